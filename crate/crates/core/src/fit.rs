//! Power-law fits, rank trends, and the second-order profiles for `α ≤ 1`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::{kernel_derivative, KernelKind};
use crate::linear::{linear_solution, RemainderSeries};
use crate::solver::{Frame, Trajectory};
use crate::spectral::{Lp, NormPoint, RealField};

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub window: (f64, f64),
    pub log_correction: bool,
    pub points: usize,
}

pub const MIN_FIT_POINTS: usize = 5;

/// Least squares of `log v` (or `log(v / log t)`) against `log t` over the
/// samples with `t` in the closed window.
pub fn fit_power_law(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    log_correction: bool,
) -> Result<DecayFit> {
    if times.len() != values.len() {
        return Err(Error::Fit(format!(
            "{} times but {} values",
            times.len(),
            values.len()
        )));
    }
    if !(window.0 < window.1) {
        return Err(Error::Fit(format!("empty window {:?}", window)));
    }
    let slack = 1e-9 * window.1.abs().max(1.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&t, &v) in times.iter().zip(values) {
        if t < window.0 - slack || t > window.1 + slack {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Fit(format!("nonpositive value {v} at t = {t}")));
        }
        if !(t > 0.0) || (log_correction && !(t > 1.0)) {
            return Err(Error::Fit(format!("time {t} not admissible for a log-log fit")));
        }
        xs.push(t.ln());
        ys.push(if log_correction { (v / t.ln()).ln() } else { v.ln() });
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "{} points in window {:?}, need {MIN_FIT_POINTS}",
            xs.len(),
            window
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("all fitted times coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(DecayFit {
        slope,
        intercept,
        r_squared,
        window,
        log_correction,
        points: xs.len(),
    })
}

/// Fits a remainder series over a window, honouring its log flag.
pub fn fit_series(series: &RemainderSeries, window: (f64, f64)) -> Result<DecayFit> {
    fit_power_law(&series.times, &series.values(), window, series.log_correction)
}

fn ranks(v: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
    let mut r = vec![0.0; v.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut k = i;
        while k + 1 < idx.len() && v[idx[k + 1]] == v[idx[i]] {
            k += 1;
        }
        let avg = 0.5 * (i + k) as f64 + 1.0;
        for &m in &idx[i..=k] {
            r[m] = avg;
        }
        i = k + 1;
    }
    r
}

/// Spearman rank correlation, with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::Fit("spearman needs two series of equal length >= 3".into()));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mean) * (b - mean)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mean).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - mean).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Ok(0.0);
    }
    Ok(cov / (vx * vy).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
}

/// `|ρ|` at or beyond which a Spearman correlation counts as a trend.
pub const TREND_THRESHOLD: f64 = 0.5;

impl Trend {
    pub fn from_rho(rho: f64) -> Trend {
        if rho <= -TREND_THRESHOLD {
            Trend::Decreasing
        } else if rho >= TREND_THRESHOLD {
            Trend::Increasing
        } else {
            Trend::Flat
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Trend::Decreasing => "decreasing",
            Trend::Flat => "flat",
            Trend::Increasing => "increasing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileCheck {
    pub times: Vec<f64>,
    pub scaled_values: Vec<f64>,
    pub rho: f64,
    pub trend: Trend,
    pub window: (f64, f64),
}

impl ProfileCheck {
    fn build(times: Vec<f64>, scaled_values: Vec<f64>, window: (f64, f64)) -> Result<Self> {
        let rho = spearman(&times, &scaled_values)?;
        Ok(ProfileCheck {
            times,
            scaled_values,
            rho,
            trend: Trend::from_rho(rho),
            window,
        })
    }
}

/// Predicted exponent of `‖u - S_α∗u₀‖_{Ḣ^{p,j}}`, and whether it carries `log t`.
pub fn first_order_exponent(alpha: f64, p: Lp, j: usize) -> (f64, bool) {
    let base = -p.conjugate_weight() / alpha - j as f64 / alpha;
    if alpha < 1.0 {
        (base - 1.0 / alpha, false)
    } else if alpha == 1.0 {
        (base - 1.0, true)
    } else {
        (base - (2.0 / alpha - 1.0), false)
    }
}

/// `‖u(t) - S_α(t)∗u₀‖_{Ḣ^{p,j}}` over every frame with `t > 0`.
pub fn first_order_remainder(traj: &Trajectory, u0: &RealField, alpha: f64, p: Lp, j: usize) -> Result<RemainderSeries> {
    let (predicted_exponent, log_correction) = first_order_exponent(alpha, p, j);
    let mut times = Vec::new();
    let mut norms = Vec::new();
    for f in traj.frames.iter().filter(|f| f.t > 0.0) {
        let free = linear_solution(u0, alpha, f.t)?;
        let value = f.field.sub(&free)?.sobolev_norm(p, j);
        times.push(f.t);
        norms.push(NormPoint { t: f.t, p, j, value });
    }
    Ok(RemainderSeries {
        times,
        norms,
        predicted_exponent,
        p,
        j,
        order: 0,
        log_correction,
        warnings: traj.warnings.clone(),
    })
}

/// `I(t) = ∫₀ᵗ ‖u(s)‖²_{L²} ds` and, for `α < 1`, its extrapolated limit.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeEnergy {
    pub times: Vec<f64>,
    pub cumulative: Vec<f64>,
    /// Estimated `∫_T^∞`, present only when the integrand is summable.
    pub tail: Option<f64>,
}

impl CumulativeEnergy {
    /// `I(t)` by linear interpolation between samples.
    pub fn at(&self, t: f64) -> f64 {
        match self.times.iter().position(|&s| s >= t) {
            Some(0) => self.cumulative[0],
            Some(i) => {
                let (t0, t1) = (self.times[i - 1], self.times[i]);
                let w = (t - t0) / (t1 - t0);
                self.cumulative[i - 1] * (1.0 - w) + self.cumulative[i] * w
            }
            None => *self.cumulative.last().unwrap_or(&0.0),
        }
    }

    pub fn finite_part(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }

    /// `I(∞)`, when the tail is defined.
    pub fn total(&self) -> Option<f64> {
        self.tail.map(|t| t + self.finite_part())
    }

    pub fn tail_fraction(&self) -> Option<f64> {
        match (self.tail, self.total()) {
            (Some(t), Some(tot)) if tot > 0.0 => Some(t / tot),
            (Some(_), Some(_)) => Some(0.0),
            _ => None,
        }
    }
}

/// Cumulative integral of uniformly sampled `(s, e(s))` pairs. Simpson on each
/// pair of intervals; a trailing odd interval uses the trapezoid rule. For
/// `α < 1` the tail beyond the last sample follows a `c(1+s)^{-1/α}` fit to
/// the last decade of samples.
pub fn cumulative_energy_from_samples(samples: &[(f64, f64)], alpha: f64) -> Result<CumulativeEnergy> {
    if samples.len() < 3 {
        return Err(Error::InsufficientFrames(format!(
            "need at least 3 energy samples, found {}",
            samples.len()
        )));
    }
    let times: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let e: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let mut cumulative = vec![0.0; samples.len()];
    let mut i = 0;
    while i + 2 < samples.len() {
        let h = 0.5 * (times[i + 2] - times[i]);
        let mid = cumulative[i] + h / 12.0 * (5.0 * e[i] + 8.0 * e[i + 1] - e[i + 2]);
        cumulative[i + 1] = mid;
        cumulative[i + 2] = cumulative[i] + h / 3.0 * (e[i] + 4.0 * e[i + 1] + e[i + 2]);
        i += 2;
    }
    if i + 1 < samples.len() {
        let h = times[i + 1] - times[i];
        cumulative[i + 1] = cumulative[i] + 0.5 * h * (e[i] + e[i + 1]);
    }
    let tail = if alpha < 1.0 {
        let t_end = times[times.len() - 1];
        let exponent = 1.0 / alpha;
        let pts: Vec<(f64, f64)> = samples
            .iter()
            .filter(|(s, _)| *s >= 0.1 * t_end)
            .copied()
            .collect();
        if pts.len() < 2 {
            return Err(Error::Fit("too few samples in the last decade for the tail".into()));
        }
        if pts.iter().all(|(_, v)| *v == 0.0) {
            Some(0.0)
        } else {
            if pts.iter().any(|(_, v)| !(*v > 0.0)) {
                return Err(Error::Fit("tail fit needs positive energies".into()));
            }
            let log_c = pts
                .iter()
                .map(|(s, v)| v.ln() + exponent * (1.0 + s).ln())
                .sum::<f64>()
                / pts.len() as f64;
            let c = log_c.exp();
            Some(c * (1.0 + t_end).powf(1.0 - exponent) / (exponent - 1.0))
        }
    } else {
        None
    };
    Ok(CumulativeEnergy {
        times,
        cumulative,
        tail,
    })
}

/// [`cumulative_energy_from_samples`] over the per-step energy history of a run,
/// falling back to the frames when no history was kept.
pub fn cumulative_energy(traj: &Trajectory) -> Result<CumulativeEnergy> {
    let samples: Vec<(f64, f64)> = if traj.energy.len() >= 3 {
        traj.energy.clone()
    } else {
        traj
            .frames
            .iter()
            .map(|f| (f.t, f.diagnostics.l2 * f.diagnostics.l2))
            .collect()
    };
    cumulative_energy_from_samples(&samples, traj.alpha)
}

fn frames_in(traj: &Trajectory, window: (f64, f64)) -> Vec<&Frame> {
    traj.frames
        .iter()
        .filter(|f| f.t >= window.0 * (1.0 - 1e-12) && f.t <= window.1 * (1.0 + 1e-12))
        .collect()
}

/// Profile check for `0 < α < 1` with an explicit `I(∞)`:
/// `t^ρ ‖u - S_α∗u₀ + ½ I(∞) ∂_x G_α(t)‖_{Ḣ^{p,j}}`, `ρ = (1-1/p)/α + j/α + 1/α`.
pub fn second_order_profile_sub1_with(
    traj: &Trajectory,
    u0: &RealField,
    alpha: f64,
    p: Lp,
    j: usize,
    window: (f64, f64),
    energy_total: f64,
) -> Result<ProfileCheck> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Alpha(alpha, "(0, 1)"));
    }
    let rho = p.conjugate_weight() / alpha + j as f64 / alpha + 1.0 / alpha;
    let mut times = Vec::new();
    let mut scaled = Vec::new();
    for f in frames_in(traj, window) {
        let free = linear_solution(u0, alpha, f.t)?;
        let dg = kernel_derivative(u0.grid(), KernelKind::Heat, alpha, f.t, 1)?;
        let rem = f.field.sub(&free)?.add_scaled(&dg, 0.5 * energy_total)?;
        times.push(f.t);
        scaled.push(f.t.powf(rho) * rem.sobolev_norm(p, j));
    }
    ProfileCheck::build(times, scaled, window)
}

/// As [`second_order_profile_sub1_with`] with `I(∞)` estimated from the run.
pub fn second_order_profile_sub1(
    traj: &Trajectory,
    u0: &RealField,
    alpha: f64,
    p: Lp,
    j: usize,
    window: (f64, f64),
) -> Result<ProfileCheck> {
    let total = cumulative_energy(traj)?
        .total()
        .ok_or_else(|| Error::Fit("no tail estimate for this alpha".into()))?;
    second_order_profile_sub1_with(traj, u0, alpha, p, j, window, total)
}

/// Profile check for `α = 1`:
/// `t^{(1-1/p)+j+1}/log t · ‖u - S₁∗u₀ + (M²/4π) log t ∂_x G₁(t)‖_{Ḣ^{p,j}}`.
pub fn log_profile_alpha1(
    traj: &Trajectory,
    u0: &RealField,
    p: Lp,
    j: usize,
    window: (f64, f64),
) -> Result<ProfileCheck> {
    if !(window.0 > 1.0) {
        return Err(Error::Fit("the log profile needs times above 1".into()));
    }
    let mass = u0.mass();
    let rho = p.conjugate_weight() + j as f64 + 1.0;
    let mut times = Vec::new();
    let mut scaled = Vec::new();
    for f in frames_in(traj, window) {
        let free = linear_solution(u0, 1.0, f.t)?;
        let dg = kernel_derivative(u0.grid(), KernelKind::Heat, 1.0, f.t, 1)?;
        let lt = f.t.ln();
        let rem = f
            .field
            .sub(&free)?
            .add_scaled(&dg, mass * mass / (4.0 * PI) * lt)?;
        times.push(f.t);
        scaled.push(f.t.powf(rho) / lt * rem.sobolev_norm(p, j));
    }
    ProfileCheck::build(times, scaled, window)
}

/// `(1/log t) ∫₀ᵗ ‖u(s)‖²_{L²} ds` together with its limit `M²/2π`.
pub fn log_energy_ratio(traj: &Trajectory, t: f64) -> Result<(f64, f64)> {
    if !(t > 1.0) {
        return Err(Error::Time(t));
    }
    let energy = cumulative_energy(traj)?;
    let last = *energy.times.last().unwrap_or(&0.0);
    if t > last * (1.0 + 1e-12) {
        return Err(Error::InsufficientFrames(format!("run ends at {last} before {t}")));
    }
    let m = traj.u0.mass();
    Ok((energy.at(t) / t.ln(), m * m / (2.0 * PI)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::make_grid;

    #[test]
    fn exact_power_laws() {
        let ts: Vec<f64> = (1..=20).map(|k| k as f64 * 5.0).collect();
        let vs: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-0.5)).collect();
        let f = fit_power_law(&ts, &vs, (1.0, 200.0), false).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-10);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let vs: Vec<f64> = ts.iter().map(|t| t.ln() / t).collect();
        let f = fit_power_law(&ts, &vs, (5.0, 100.0), true).unwrap();
        assert!((f.slope + 1.0).abs() < 1e-10);
    }

    #[test]
    fn subleading_correction_bends_the_fit() {
        let ts = crate::linear::log_spaced(10.0, 100.0, 16);
        let vs: Vec<f64> = ts.iter().map(|t| (1.0 + t.powf(-0.5)) / t).collect();
        let f = fit_power_law(&ts, &vs, (10.0, 100.0), false).unwrap();
        assert!(f.slope > -1.15 && f.slope < -1.0, "{}", f.slope);
    }

    #[test]
    fn fit_errors() {
        let ts = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert!(fit_power_law(&ts, &[1.0, 1.0, 0.0, 1.0, 1.0, 1.0], (0.5, 7.0), false).is_err());
        assert!(fit_power_law(&ts, &[1.0; 6], (2.5, 4.5), false).is_err());
        assert!(fit_power_law(&ts, &[1.0; 5], (0.5, 7.0), false).is_err());
        assert!(fit_power_law(&ts, &[1.0; 6], (0.5, 7.0), true).is_err());
    }

    #[test]
    fn spearman_basics() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((spearman(&x, &[5.0, 4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&x, &[1.0, 4.0, 9.0, 16.0, 25.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(spearman(&x, &[2.0; 5]).unwrap(), 0.0);
        assert_eq!(Trend::from_rho(-0.7), Trend::Decreasing);
        assert_eq!(Trend::from_rho(0.1), Trend::Flat);
        // ties take the average rank
        assert_eq!(ranks(&[3.0, 1.0, 3.0]), vec![2.5, 1.0, 2.5]);
    }

    #[test]
    fn first_order_exponents() {
        let (e, log) = first_order_exponent(1.5, Lp::Two, 0);
        assert!((e + 2.0 / 3.0).abs() < 1e-15 && !log);
        let (e, _) = first_order_exponent(1.5, Lp::Inf, 0);
        assert!((e + 1.0).abs() < 1e-15);
        let (e, log) = first_order_exponent(1.0, Lp::Two, 1);
        assert!((e + 2.5).abs() < 1e-15 && log);
        let (e, _) = first_order_exponent(0.75, Lp::One, 0);
        assert!((e + 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn synthetic_energy_integrals() {
        let samples: Vec<(f64, f64)> = (0..=2000)
            .map(|i| {
                let s = i as f64 * 0.1;
                (s, (1.0 + s).powi(-2))
            })
            .collect();
        let e = cumulative_energy_from_samples(&samples, 0.5).unwrap();
        assert!((e.total().unwrap() - 1.0).abs() < 1e-2);
        let mid = e.at(200.0);
        // Simpson error h⁴/180·∫f⁗ ≈ 1.3e-5 at h = 0.1
        assert!((mid - (1.0 - 1.0 / 201.0)).abs() < 2e-5, "{mid}");
        let zero: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        let z = cumulative_energy_from_samples(&zero, 0.5).unwrap();
        assert_eq!(z.total(), Some(0.0));
        assert!(cumulative_energy_from_samples(&zero, 1.2).unwrap().tail.is_none());
    }

    #[test]
    fn poisson_kernel_energy() {
        let grid = make_grid(65536, 16384.0).unwrap();
        let g = crate::kernels::sample_g(&grid, 1.0, 1.0).unwrap();
        let e = g.lp_norm(Lp::Two).powi(2);
        // periodic images raise the value by about 2π/(3L²)
        assert!((e - 1.0 / (2.0 * PI)).abs() < 1e-8, "{e}");
    }

    #[test]
    fn profile_rejects_alpha() {
        let grid = make_grid(64, 20.0).unwrap();
        let f = RealField::zeros(grid.clone());
        let traj = Trajectory::from_fields(0.75, vec![(0.0, f.clone()), (1.0, f.clone())]).unwrap();
        assert!(second_order_profile_sub1_with(&traj, &f, 1.2, Lp::Two, 0, (0.5, 2.0), 0.0).is_err());
    }
}
