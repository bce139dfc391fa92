//! The generalized heat kernel `G_α` and the dissipative-dispersive kernel `S_α`.
//!
//! Grid samples are exact inverse DFTs of the symbols `e^{-t|ξ|^α}` and
//! `e^{(iξ³-|ξ|^α)t}`; [`eval_quadrature`] evaluates the same integrals pointwise
//! and serves as the independent cross-check.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::integrate_panels;
use crate::spectral::{Grid, GridRef, RealField, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `G_α`, fundamental solution of `u_t + |D|^α u = 0`.
    Heat,
    /// `S_α`, kernel of `u_t + u_xxx + |D|^α u = 0`.
    Full,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample {
    pub alpha: f64,
    pub t: f64,
    pub kind: KernelKind,
    pub field: RealField,
}

pub(crate) fn check_kernel_args(alpha: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::Alpha(alpha, "(0, 2]"));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Time(t));
    }
    Ok(())
}

/// Fourier symbol of the kernel at time `t`, storage order.
pub fn kernel_symbol(grid: &Grid, kind: KernelKind, alpha: f64, t: f64) -> Result<Vec<Complex64>> {
    check_kernel_args(alpha, t)?;
    let diss = grid.dissipation_symbol(alpha)?;
    Ok(match kind {
        KernelKind::Heat => diss
            .iter()
            .map(|a| Complex64::new((-t * a).exp(), 0.0))
            .collect(),
        KernelKind::Full => grid
            .dispersion_symbol()
            .iter()
            .zip(&diss)
            .map(|(d, a)| ((d - a) * t).exp())
            .collect(),
    })
}

/// Inverse transform of `(iξ)^j` times the kernel symbol.
pub fn kernel_derivative(
    grid: &GridRef,
    kind: KernelKind,
    alpha: f64,
    t: f64,
    j: usize,
) -> Result<RealField> {
    let symbol = kernel_symbol(grid, kind, alpha, t)?;
    let spec = SpectralField::new(grid.clone(), symbol)?;
    Ok(spec.derivative(j).to_physical())
}

pub fn sample_g(grid: &GridRef, alpha: f64, t: f64) -> Result<RealField> {
    kernel_derivative(grid, KernelKind::Heat, alpha, t, 0)
}

pub fn sample_s(grid: &GridRef, alpha: f64, t: f64) -> Result<RealField> {
    kernel_derivative(grid, KernelKind::Full, alpha, t, 0)
}

pub fn sample(grid: &GridRef, kind: KernelKind, alpha: f64, t: f64) -> Result<KernelSample> {
    Ok(KernelSample {
        alpha,
        t,
        kind,
        field: kernel_derivative(grid, kind, alpha, t, 0)?,
    })
}

/// `G_2(t, x) = (4πt)^{-1/2} e^{-x²/4t}`.
pub fn gaussian_kernel(t: f64, x: f64) -> f64 {
    (-x * x / (4.0 * t)).exp() / (4.0 * PI * t).sqrt()
}

/// `G_1(t, x) = t / (π (x² + t²))`.
pub fn poisson_kernel(t: f64, x: f64) -> f64 {
    t / (PI * (x * x + t * t))
}

/// Default absolute tolerance of [`eval_quadrature`].
pub const QUADRATURE_TOL: f64 = 1e-8;

/// `(1/π) ∫_0^∞ cos(xξ + tξ³[S]) e^{-tξ^α} dξ` with the quadrature tolerance `QUADRATURE_TOL`.
pub fn eval_quadrature(kind: KernelKind, alpha: f64, t: f64, x: f64) -> Result<f64> {
    eval_quadrature_tol(kind, alpha, t, x, QUADRATURE_TOL)
}

/// As [`eval_quadrature`] with an explicit absolute tolerance.
///
/// The range is cut where `e^{-tξ^α} < 1e-16`; panels are sized so the phase
/// advances by at most π across each one, then refined adaptively.
pub fn eval_quadrature_tol(
    kind: KernelKind,
    alpha: f64,
    t: f64,
    x: f64,
    tolerance: f64,
) -> Result<f64> {
    check_kernel_args(alpha, t)?;
    let cutoff = (16.0 * std::f64::consts::LN_10 / t).powf(1.0 / alpha);
    let disp = match kind {
        KernelKind::Heat => 0.0,
        KernelKind::Full => t,
    };
    let base = cutoff / 32.0;
    let mut breaks = vec![0.0];
    let mut xi = 0.0;
    while xi < cutoff {
        let rate = x.abs() + 3.0 * disp * xi * xi;
        let w = if rate > 0.0 { base.min(PI / rate) } else { base };
        xi = (xi + w).min(cutoff);
        breaks.push(xi);
    }
    let integrand = |xi: f64| (x * xi + disp * xi * xi * xi).cos() * (-t * xi.powf(alpha)).exp();
    let max_panels = 64 * breaks.len() + 100_000;
    let (value, _) = integrate_panels(integrand, &breaks, tolerance * PI, max_panels)?;
    Ok(value / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Lp};

    #[test]
    fn quadrature_closed_forms() {
        let g1 = eval_quadrature(KernelKind::Heat, 1.0, 1.0, 0.0).unwrap();
        assert!((g1 - 1.0 / PI).abs() < 1e-8);
        let g2 = eval_quadrature(KernelKind::Heat, 2.0, 1.0, 0.0).unwrap();
        assert!((g2 - (4.0 * PI).powf(-0.5)).abs() < 1e-8);
        for &x in &[0.5, 2.0, 7.0] {
            let v = eval_quadrature_tol(KernelKind::Heat, 1.0, 2.0, x, 1e-12).unwrap();
            assert!((v - poisson_kernel(2.0, x)).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn quadrature_self_similarity() {
        let lhs = eval_quadrature(KernelKind::Heat, 1.5, 8.0, 2.0).unwrap();
        let s = 8f64.powf(-1.0 / 1.5);
        let rhs = s * eval_quadrature(KernelKind::Heat, 1.5, 1.0, 2.0 * s).unwrap();
        assert!((lhs - rhs).abs() < 1e-7);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert_eq!(
            eval_quadrature(KernelKind::Heat, 1.0, 0.0, 0.0).unwrap_err(),
            Error::Time(0.0)
        );
        let grid = make_grid(64, 20.0).unwrap();
        assert!(sample_g(&grid, 1.0, -1.0).is_err());
        assert!(sample_s(&grid, 2.5, 1.0).is_err());
    }

    #[test]
    fn sampled_kernels_have_unit_mass_and_parity() {
        let grid = make_grid(2048, 200.0).unwrap();
        for &alpha in &[0.75, 1.0, 1.5, 2.0] {
            let g = sample_g(&grid, alpha, 1.0).unwrap();
            assert!((g.mass() - 1.0).abs() < 1e-10);
            let s = sample_s(&grid, alpha, 1.0).unwrap();
            assert!((s.mass() - 1.0).abs() < 1e-10);
            // even in x: x_m ↦ -x_m maps index m to n - m
            let n = grid.n();
            let odd = (1..n)
                .map(|m| (g.values()[m] - g.values()[n - m]).abs())
                .fold(0.0, f64::max);
            assert!(odd < 1e-10);
            let dg = kernel_derivative(&grid, KernelKind::Heat, alpha, 1.0, 1).unwrap();
            let even = (1..n)
                .map(|m| (dg.values()[m] + dg.values()[n - m]).abs())
                .fold(0.0, f64::max);
            assert!(even < 1e-10);
            assert!((s.lp_norm(Lp::Two) - g.lp_norm(Lp::Two)).abs() < 1e-10);
        }
    }

    #[test]
    fn gaussian_kernel_on_grid() {
        let grid = make_grid(1024, 100.0).unwrap();
        for &t in &[1.0, 4.0] {
            let g = sample_g(&grid, 2.0, t).unwrap();
            let err = g
                .values()
                .iter()
                .zip(grid.xs())
                .map(|(v, &x)| (v - gaussian_kernel(t, x)).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-8);
        }
    }

    #[test]
    fn full_kernel_matches_quadrature() {
        let grid = make_grid(4096, 400.0).unwrap();
        let s = sample_s(&grid, 1.5, 1.0).unwrap();
        for &x in &[0.0, 1.0, -1.0, 5.0, -5.0] {
            let m = ((x + 200.0) / grid.dx()).round() as usize;
            let q = eval_quadrature(KernelKind::Full, 1.5, 1.0, grid.xs()[m]).unwrap();
            assert!((s.values()[m] - q).abs() < 1e-6, "x={x}: {} vs {q}", s.values()[m]);
        }
    }

    #[test]
    fn derivative_order_zero_is_sample() {
        let grid = make_grid(256, 50.0).unwrap();
        let a = kernel_derivative(&grid, KernelKind::Full, 1.2, 2.0, 0).unwrap();
        let b = sample_s(&grid, 1.2, 2.0).unwrap();
        assert_eq!(a, b);
    }
}
