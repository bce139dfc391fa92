//! Slow reference computations for checking the spectral fast paths.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solver::{simpson_frames, simpson_weight, simulate, Dealias, SolverConfig, Trajectory};
use crate::spectral::{GridRef, RealField, SpectralField};

/// Largest grid the O(n²) oracles accept.
pub const DIRECT_CAP: usize = 512;
/// Caps for [`reference_solve`].
pub const REFERENCE_GRID_CAP: usize = 1024;
pub const REFERENCE_TIME_CAP: f64 = 20.0;
/// Step refinement of [`reference_solve`] relative to the production default.
pub const REFERENCE_REFINEMENT: f64 = 16.0;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub name: String,
    pub max_abs_error: f64,
    pub rel_error: f64,
    pub n: usize,
    pub notes: String,
}

impl OracleReport {
    pub fn compare(name: &str, fast: &[f64], slow: &[f64], notes: &str) -> Self {
        let max_abs_error = fast
            .iter()
            .zip(slow)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        OracleReport {
            name: name.to_string(),
            max_abs_error,
            rel_error: if scale > 0.0 { max_abs_error / scale } else { max_abs_error },
            n: fast.len(),
            notes: notes.to_string(),
        }
    }

    pub fn compare_complex(name: &str, fast: &[Complex64], slow: &[Complex64], notes: &str) -> Self {
        let max_abs_error = fast
            .iter()
            .zip(slow)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let scale = slow.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        OracleReport {
            name: name.to_string(),
            max_abs_error,
            rel_error: if scale > 0.0 { max_abs_error / scale } else { max_abs_error },
            n: fast.len(),
            notes: notes.to_string(),
        }
    }
}

fn check_cap(grid: &GridRef, cap: usize) -> Result<()> {
    if grid.n() > cap {
        return Err(Error::GridTooLarge { n: grid.n(), cap });
    }
    Ok(())
}

/// `(f∗g)(x_m) = dx Σ_l f(x_l) g(x_m - x_l)` with periodic wrap.
pub fn direct_convolution(f: &RealField, g: &RealField) -> Result<RealField> {
    let grid = f.grid().clone();
    check_cap(&grid, DIRECT_CAP)?;
    if *grid != **g.grid() {
        return Err(Error::GridMismatch);
    }
    let n = grid.n();
    let (fv, gv) = (f.values(), g.values());
    // x_m - x_l = (m - l) dx is the abscissa of index (m - l + n/2) mod n
    let values = (0..n)
        .map(|m| {
            grid.dx()
                * (0..n)
                    .map(|l| fv[l] * gv[(m + n + n / 2 - l) % n])
                    .sum::<f64>()
        })
        .collect();
    RealField::new(grid, values)
}

/// `dx Σ_m f(x_m) e^{-i x_m ξ_k}` evaluated term by term.
pub fn direct_transform(f: &RealField) -> Result<SpectralField> {
    let grid = f.grid().clone();
    check_cap(&grid, DIRECT_CAP)?;
    let coeffs = grid
        .xis()
        .iter()
        .map(|&xi| {
            f.values()
                .iter()
                .zip(grid.xs())
                .map(|(&v, &x)| Complex64::from_polar(v, -x * xi))
                .sum::<Complex64>()
                * grid.dx()
        })
        .collect();
    SpectralField::new(grid, coeffs)
}

/// The production stepper with a step 16 times below the default.
pub fn reference_solve(u0: &RealField, alpha: f64, t_final: f64, output_times: Vec<f64>) -> Result<Trajectory> {
    check_cap(u0.grid(), REFERENCE_GRID_CAP)?;
    if t_final > REFERENCE_TIME_CAP {
        return Err(Error::Parameter(format!(
            "reference horizon {t_final} exceeds {REFERENCE_TIME_CAP}"
        )));
    }
    let mut cfg = SolverConfig::new(alpha, t_final, output_times);
    let default = cfg.cfl_limit(u0.grid(), u0.max_abs());
    cfg.dt = Some(default / REFERENCE_REFINEMENT);
    simulate(u0, &cfg)
}

/// `u(t)` rebuilt from the frames as `S_α(t)∗u₀ - ½∫₀ᵗ S_α(t-s)∗∂_x u²(s) ds`,
/// forming `u²` pointwise frame by frame and integrating by Simpson's rule.
pub fn duhamel_direct(traj: &Trajectory, alpha: f64, t: f64) -> Result<RealField> {
    let frames = simpson_frames(traj, t)?;
    let grid = traj.grid().clone();
    let intervals = frames.len() - 1;
    let h = t / intervals as f64;
    let n = grid.n();
    let cutoff = match traj.dealias {
        Dealias::None => None,
        Dealias::TwoThirds => Some(n / 3),
        Dealias::Cutoff(k) => Some(k),
    };
    let keep = |i: usize| cutoff.is_none_or(|kc| grid.wavenumber(i).unsigned_abs() as usize <= kc);
    let propagator = |i: usize, tau: f64| {
        let xi = grid.xis()[i];
        let disp = if i == grid.nyquist_index() { 0.0 } else { xi * xi * xi };
        Complex64::from_polar((-tau * xi.abs().powf(alpha)).exp(), disp * tau)
    };
    let u0 = traj.u0.to_spectral();
    let mut acc: Vec<Complex64> = (0..n).map(|i| propagator(i, t) * u0.coeffs()[i]).collect();
    for (idx, f) in frames.iter().enumerate() {
        let w = simpson_weight(idx, intervals) * h / 3.0;
        let mut hat = f.field.to_spectral();
        for (i, c) in hat.coeffs_mut().iter_mut().enumerate() {
            if !keep(i) {
                *c = Complex64::default();
            }
        }
        let filtered = hat.to_physical();
        let sq: Vec<f64> = filtered.values().iter().map(|v| v * v).collect();
        let sq_hat = RealField::new(grid.clone(), sq)?.to_spectral();
        for (i, a) in acc.iter_mut().enumerate() {
            if !keep(i) || i == grid.nyquist_index() {
                continue;
            }
            let dx_sq = Complex64::new(0.0, grid.xis()[i]) * sq_hat.coeffs()[i];
            *a -= 0.5 * w * propagator(i, t - f.t) * dx_sq;
        }
    }
    Ok(SpectralField::new(grid, acc)?.to_physical())
}

/// `-½ ∂_x (u²)` of a sampled field by centred differences of order four, as
/// an independent check of the spectral nonlinearity.
pub fn finite_difference_advection(u: &RealField) -> Result<RealField> {
    let grid = u.grid().clone();
    let n = grid.n();
    let sq: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    let h = grid.dx();
    let values = (0..n)
        .map(|m| {
            let at = |k: isize| sq[((m as isize + k).rem_euclid(n as isize)) as usize];
            let d = (at(-2) - 8.0 * at(-1) + 8.0 * at(1) - at(2)) / (12.0 * h);
            -0.5 * d
        })
        .collect();
    RealField::new(grid, values)
}

/// `(1/2π) ∫ e^{ixξ} e^{-t|ξ|^α}` by direct quadrature; see the kernels module.
pub fn heat_kernel_value(alpha: f64, t: f64, x: f64) -> Result<f64> {
    crate::kernels::eval_quadrature_tol(crate::kernels::KernelKind::Heat, alpha, t, x, 1e-12)
}

/// Closed-form transform of `e^{-x²/2}`.
pub fn gaussian_transform(xi: f64) -> f64 {
    (2.0 * PI).sqrt() * (-0.5 * xi * xi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::InitialData;
    use crate::solver::{nonlinear_term, Dealias};
    use crate::spectral::make_grid;

    fn tiny() -> GridRef {
        make_grid(128, 64.0).unwrap()
    }

    fn bump(grid: &GridRef, c: f64, w: f64) -> RealField {
        InitialData::gaussian(1.0, c, w).sample(grid).unwrap()
    }

    #[test]
    fn convolution_matches_spectral() {
        let g = tiny();
        let (a, b) = (bump(&g, 1.0, 2.0), bump(&g, -3.0, 1.5));
        let direct = direct_convolution(&a, &b).unwrap();
        let spectral = a.to_spectral().convolve(&b.to_spectral()).unwrap().to_physical();
        let r = OracleReport::compare("convolution", spectral.values(), direct.values(), "");
        assert!(r.max_abs_error < 1e-9, "{r:?}");
        let swapped = direct_convolution(&b, &a).unwrap();
        let r = OracleReport::compare("commute", swapped.values(), direct.values(), "");
        assert!(r.max_abs_error < 1e-12);
    }

    #[test]
    fn narrow_bump_convolution_smooths_little() {
        let g = tiny();
        let f = bump(&g, 0.0, 4.0);
        let delta = InitialData::gaussian_with_mass(1.0, 0.8).sample(&g).unwrap();
        let c = direct_convolution(&f, &delta).unwrap();
        // a unit-mass Gaussian of width w shifts a Gaussian of width W by O(w²/W²)
        let r = OracleReport::compare("delta", c.values(), f.values(), "");
        assert!(r.max_abs_error < 0.05, "{r:?}");
    }

    #[test]
    fn transform_matches_fft() {
        let g = tiny();
        let f = bump(&g, 2.0, 1.7);
        let direct = direct_transform(&f).unwrap();
        let fast = f.to_spectral();
        let r = OracleReport::compare_complex("transform", fast.coeffs(), direct.coeffs(), "");
        assert!(r.max_abs_error < 1e-10, "{r:?}");
        assert!(direct.hermitian_defect() < 1e-12);
        let zero = direct_transform(&RealField::zeros(g.clone())).unwrap();
        assert!(zero.coeffs().iter().all(|c| c.norm() == 0.0));
        // dx = 1/4 keeps the aliased tail of the Gaussian spectrum below 1e-10
        let fine = make_grid(256, 64.0).unwrap();
        let half = RealField::from_fn(fine.clone(), |x| (-0.5 * x * x).exp()).unwrap();
        let d = direct_transform(&half).unwrap();
        for (c, xi) in d.coeffs().iter().zip(fine.xis()) {
            assert!((c - gaussian_transform(*xi)).norm() < 1e-10);
        }
    }

    #[test]
    fn caps_are_enforced() {
        let g = make_grid(1024, 10.0).unwrap();
        let f = RealField::zeros(g.clone());
        assert_eq!(
            direct_transform(&f).unwrap_err(),
            Error::GridTooLarge { n: 1024, cap: DIRECT_CAP }
        );
        assert!(direct_convolution(&f, &f).is_err());
        let big = make_grid(2048, 10.0).unwrap();
        assert!(reference_solve(&RealField::zeros(big), 1.5, 1.0, vec![1.0]).is_err());
        assert!(reference_solve(&RealField::zeros(g), 1.5, 25.0, vec![1.0]).is_err());
    }

    #[test]
    fn reference_run_conserves_mass() {
        let g = tiny();
        let u0 = bump(&g, 0.0, 1.5);
        let r = reference_solve(&u0, 1.5, 2.0, vec![0.0, 1.0, 2.0]).unwrap();
        for f in &r.frames {
            assert!((f.diagnostics.mass - u0.mass()).abs() < 1e-12 * u0.mass());
        }
        let z = reference_solve(&RealField::zeros(g), 1.5, 1.0, vec![1.0]).unwrap();
        assert!(z.frames[0].field.max_abs() == 0.0);
    }

    #[test]
    fn duhamel_of_zero_is_free_flow() {
        let g = tiny();
        let zero = RealField::zeros(g.clone());
        let frames = (0..=4).map(|i| (0.25 * i as f64, zero.clone())).collect();
        let mut traj = Trajectory::from_fields(1.5, frames).unwrap();
        let u0 = bump(&g, 0.0, 1.5);
        traj.u0 = u0.clone();
        let d = duhamel_direct(&traj, 1.5, 1.0).unwrap();
        let free = crate::linear::linear_solution(&u0, 1.5, 1.0).unwrap();
        assert!(OracleReport::compare("free", d.values(), free.values(), "").max_abs_error < 1e-14);
    }

    #[test]
    fn finite_difference_nonlinearity() {
        let g = make_grid(2048, 64.0).unwrap();
        let u = bump(&g, 0.0, 2.0);
        let fd = finite_difference_advection(&u).unwrap();
        let spectral = nonlinear_term(&u.to_spectral(), Dealias::None).to_physical();
        let r = OracleReport::compare("advection", spectral.values(), fd.values(), "");
        assert!(r.max_abs_error < 1e-6, "{r:?}");
    }
}
