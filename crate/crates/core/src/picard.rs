//! Picard iterates of the Duhamel map, `F⁰ = S_α(t)∗u₀` and
//! `F^{n+1} = S_α(t)∗u₀ - ½∫₀ᵗ S_α(t-s)∗∂_x(F^n(s))² ds`.
//!
//! Each `F^{n+1}` solves the linear equation forced by the nonlinearity of
//! `F^n`, so the whole ladder is advanced together as a triangular system by
//! the same stepper as the full equation.

use crate::error::{Error, Result};
use crate::linear::RemainderSeries;
use crate::solver::{Diagnostics, Frame, FrameRecorder, SolverConfig, Stepper, Trajectory};
use crate::spectral::{Lp, NormPoint, RealField};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PicardOrder {
    pub alpha: f64,
    pub order: usize,
    /// `α = (2N+3)/(N+2)`, where the bound picks up a `log` factor.
    pub boundary: bool,
}

/// `N = min{n ≥ 0 : α ≤ (2n+3)/(n+2)}` for `1 < α < 2`.
pub fn picard_order(alpha: f64) -> Result<PicardOrder> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(Error::Alpha(alpha, "(1, 2)"));
    }
    // (2n+3)/(n+2) = 2 - 1/(n+2) increases to 2, so the search terminates.
    let mut n = 0usize;
    loop {
        let edge = (2 * n + 3) as f64 / (n + 2) as f64;
        if alpha <= edge {
            let boundary = (alpha - edge).abs() <= 4.0 * f64::EPSILON * edge;
            return Ok(PicardOrder {
                alpha,
                order: n,
                boundary,
            });
        }
        n += 1;
    }
}

/// Trajectories of `F⁰, …, F^n` on the stepper's time grid.
pub fn picard_ladder(u0: &RealField, n: usize, config: &SolverConfig) -> Result<Vec<Trajectory>> {
    let (dt, steps) = config.resolve(u0)?;
    let grid = u0.grid().clone();
    let mut stepper = Stepper::new(&grid, config.alpha, dt, config.dealias, true)?;
    let outputs = config.output_steps(dt, steps);
    let v0 = u0.to_spectral().into_coeffs();
    let mut levels = vec![v0.clone(); n + 1];
    let mut recorders: Vec<FrameRecorder> = (0..=n).map(|_| FrameRecorder::new()).collect();
    let mut energies: Vec<Vec<(f64, f64)>> = vec![vec![(0.0, energy(&v0, grid.length()))]; n + 1];
    let mut next = outputs.iter().peekable();
    if next.peek() == Some(&&0) {
        next.next();
        for r in recorders.iter_mut() {
            r.frames.push(Frame {
                t: 0.0,
                field: u0.clone(),
                diagnostics: Diagnostics::of(u0),
                truncated: false,
            });
        }
    }
    for s in 1..=steps {
        stepper.step_ladder(&mut levels);
        let t = s as f64 * dt;
        for (level, e) in levels.iter().zip(energies.iter_mut()) {
            if level.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::NumericalAbort { t });
            }
            e.push((t, energy(level, grid.length())));
        }
        if next.peek() == Some(&&s) {
            next.next();
            for (level, r) in levels.iter().zip(recorders.iter_mut()) {
                r.record(&grid, t, level)?;
            }
        }
    }
    Ok(recorders
        .into_iter()
        .zip(energies)
        .map(|(r, energy)| Trajectory {
            alpha: config.alpha,
            dt,
            dealias: config.dealias,
            nonlinear: true,
            u0: u0.clone(),
            frames: r.frames,
            energy,
            warnings: r.warnings,
        })
        .collect())
}

fn energy(v: &[rustfft::num_complex::Complex64], length: f64) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>() / length
}

/// The single iterate `F^n`.
pub fn picard_iterate(u0: &RealField, alpha: f64, n: usize, config: &SolverConfig) -> Result<Trajectory> {
    let mut config = config.clone();
    config.alpha = alpha;
    let mut ladder = picard_ladder(u0, n, &config)?;
    Ok(ladder.pop().expect("ladder has n + 1 levels"))
}

/// `‖u(t) - F(t)‖_{Ḣ^{p,j}}` per shared frame with `t > 0`, predicted to decay
/// like `t^{-(1-1/p)/α - j/α - 1/α}` (times `log t` on a boundary `α`).
pub fn picard_remainder(u: &Trajectory, f: &Trajectory, p: Lp, j: usize) -> Result<RemainderSeries> {
    if u.frames.len() != f.frames.len() {
        return Err(Error::FrameMismatch(format!(
            "{} frames against {}",
            u.frames.len(),
            f.frames.len()
        )));
    }
    let alpha = u.alpha;
    let log_correction = picard_order(alpha).map(|o| o.boundary).unwrap_or(false);
    let mut times = Vec::new();
    let mut norms = Vec::new();
    for (a, b) in u.frames.iter().zip(&f.frames) {
        if (a.t - b.t).abs() > 1e-9 * a.t.max(1.0) {
            return Err(Error::FrameMismatch(format!("frame at {} against {}", a.t, b.t)));
        }
        if a.t <= 0.0 {
            continue;
        }
        let value = a.field.sub(&b.field)?.sobolev_norm(p, j);
        times.push(a.t);
        norms.push(NormPoint { t: a.t, p, j, value });
    }
    let mut warnings = u.warnings.clone();
    warnings.extend(f.warnings.iter().cloned());
    Ok(RemainderSeries {
        times,
        norms,
        predicted_exponent: -p.conjugate_weight() / alpha - j as f64 / alpha - 1.0 / alpha,
        p,
        j,
        order: 0,
        log_correction,
        warnings,
    })
}
