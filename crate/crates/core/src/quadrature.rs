//! Globally adaptive Gauss–Kronrod (7/15) quadrature on a finite interval.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut lo = [0.0; 7];
    let mut hi = [0.0; 7];
    for i in 0..7 {
        let dx = half * XGK[i];
        lo[i] = f(center - dx);
        hi[i] = f(center + dx);
    }
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    for i in 0..7 {
        kron += WGK[i] * (lo[i] + hi[i]);
        resabs += WGK[i] * (lo[i].abs() + hi[i].abs());
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo[i] + hi[i]);
        }
    }
    let value = kron * half;
    let mean = 0.5 * kron;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for i in 0..7 {
        resasc += WGK[i] * ((lo[i] - mean).abs() + (hi[i] - mean).abs());
    }
    let resabs = resabs * half.abs();
    let resasc = resasc * half.abs();
    let mut error = ((kron - gauss) * half).abs();
    if resasc != 0.0 && error != 0.0 {
        error = resasc * (200.0 * error / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * resabs);
    }
    Panel { a, b, value, error }
}

/// Integrates `f` over the consecutive panels delimited by `breaks`, bisecting the
/// worst panel until the summed error estimate falls below `tolerance`.
pub fn integrate_panels(
    f: impl Fn(f64) -> f64,
    breaks: &[f64],
    tolerance: f64,
    max_panels: usize,
) -> Result<(f64, f64)> {
    let mut heap: BinaryHeap<Panel> = breaks
        .windows(2)
        .map(|w| kronrod(&f, w[0], w[1]))
        .collect();
    let mut total_err: f64 = heap.iter().map(|p| p.error).sum();
    while total_err > tolerance {
        if heap.len() >= max_panels {
            return Err(Error::Quadrature {
                estimate: total_err,
                tolerance,
            });
        }
        let worst = heap.pop().expect("at least one panel");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect further in floating point
            return Err(Error::Quadrature {
                estimate: total_err,
                tolerance,
            });
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if heap.len().is_multiple_of(4096) {
            // refresh the running sum against drift
            total_err = heap.iter().map(|p| p.error).sum();
        }
    }
    let value = heap.iter().map(|p| p.value).sum::<f64>();
    Ok((value, total_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_exact() {
        let (v, _) = integrate_panels(|x| x.powi(7) - 3.0 * x * x, &[0.0, 2.0], 1e-11, 10).unwrap();
        assert!((v - (256.0 / 8.0 - 8.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singular_derivative() {
        let (v, _) =
            integrate_panels(|x: f64| x.powf(0.75), &[0.0, 1.0], 1e-12, 10_000).unwrap();
        assert!((v - 1.0 / 1.75).abs() < 1e-11);
    }

    #[test]
    fn oscillatory() {
        let breaks: Vec<f64> = (0..=64).map(|k| k as f64 * std::f64::consts::PI / 4.0).collect();
        let (v, _) = integrate_panels(|x: f64| (10.0 * x).cos(), &breaks, 1e-11, 10_000).unwrap();
        let exact = (10.0 * 16.0 * std::f64::consts::PI).sin() / 10.0;
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        let r = integrate_panels(|x: f64| (1.0 / x).sin(), &[1e-8, 1.0], 1e-15, 20);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }
}
