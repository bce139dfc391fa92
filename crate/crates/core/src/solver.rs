//! Integrating-factor RK4 for `u_t + u_xxx + |D|^α u + u u_x = 0`.
//!
//! The state is the coefficient vector `û`. With `σ = iξ³ - |ξ|^α` the linear
//! part is carried exactly by `e^{σ dt}`, and RK4 integrates the interaction
//! variable `e^{-tσ} û`.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{GridRef, Lp, RealField, SpectralField};

/// Mode filter applied before and after forming `u²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dealias {
    None,
    /// Zero every `|k| > n/3`.
    TwoThirds,
    /// Zero every `|k| >` the given wavenumber.
    Cutoff(usize),
}

impl Dealias {
    fn cutoff(self, n: usize) -> Option<usize> {
        match self {
            Dealias::None => None,
            Dealias::TwoThirds => Some(n / 3),
            Dealias::Cutoff(k) => Some(k),
        }
    }

    fn mask(self, grid: &GridRef) -> Option<Vec<f64>> {
        self.cutoff(grid.n()).map(|kc| {
            (0..grid.n())
                .map(|i| {
                    if grid.wavenumber(i).unsigned_abs() as usize > kc {
                        0.0
                    } else {
                        1.0
                    }
                })
                .collect()
        })
    }
}

/// Relative boundary amplitude above which later frames are flagged.
pub const TRUNCATION_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub alpha: f64,
    /// Step size; `None` picks `cfl_safety·dx/max(1, ‖u₀‖_∞)`.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub dealias: Dealias,
    pub output_times: Vec<f64>,
    pub cfl_safety: f64,
    /// When false the flow is purely linear.
    pub nonlinear: bool,
}

impl SolverConfig {
    pub fn new(alpha: f64, t_final: f64, output_times: Vec<f64>) -> Self {
        SolverConfig {
            alpha,
            dt: None,
            t_final,
            dealias: Dealias::TwoThirds,
            output_times,
            cfl_safety: 0.5,
            nonlinear: true,
        }
    }

    /// Output times `0, h, 2h, …, T`.
    pub fn uniform(alpha: f64, t_final: f64, frames: usize) -> Self {
        let times = (0..=frames)
            .map(|i| t_final * i as f64 / frames as f64)
            .collect();
        Self::new(alpha, t_final, times)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = Some(dt);
        self
    }

    pub fn linear(mut self) -> Self {
        self.nonlinear = false;
        self
    }

    pub fn cfl_limit(&self, grid: &GridRef, sup: f64) -> f64 {
        self.cfl_safety * grid.dx() / sup.max(1.0)
    }

    /// Validates the configuration against the data and returns the step size
    /// actually used (the requested one shrunk so that steps land on `T`) and
    /// the step count.
    pub fn resolve(&self, u0: &RealField) -> Result<(f64, usize)> {
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::Alpha(self.alpha, "(0, 2]"));
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::Time(self.t_final));
        }
        if !(self.cfl_safety > 0.0) {
            return Err(Error::Parameter("cfl_safety must be positive".into()));
        }
        let limit = self.cfl_limit(u0.grid(), u0.max_abs());
        let dt = self.dt.unwrap_or(limit);
        if !(dt > 0.0) || dt > self.t_final {
            return Err(Error::Parameter(format!(
                "time step {dt} must lie in (0, T = {}]",
                self.t_final
            )));
        }
        if dt > limit * (1.0 + 1e-12) {
            return Err(Error::Cfl { dt, limit });
        }
        if let Some(&t) = self
            .output_times
            .iter()
            .find(|&&t| !(0.0..=self.t_final).contains(&t))
        {
            return Err(Error::Parameter(format!(
                "output time {t} outside [0, {}]",
                self.t_final
            )));
        }
        let steps = (self.t_final / dt - 1e-9).ceil().max(1.0) as usize;
        Ok((self.t_final / steps as f64, steps))
    }

    /// Step indices of the requested outputs, sorted and deduplicated.
    pub(crate) fn output_steps(&self, dt: f64, steps: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .output_times
            .iter()
            .map(|&t| ((t / dt).round() as usize).min(steps))
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub mass: f64,
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub min: f64,
    pub max: f64,
    pub boundary: f64,
}

impl Diagnostics {
    pub fn of(field: &RealField) -> Self {
        Diagnostics {
            mass: field.mass(),
            l1: field.lp_norm(Lp::One),
            l2: field.lp_norm(Lp::Two),
            linf: field.lp_norm(Lp::Inf),
            min: field.min(),
            max: field.max(),
            boundary: field.boundary_amplitude(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub t: f64,
    pub field: RealField,
    pub diagnostics: Diagnostics,
    /// Set on this and every later frame once the edge amplitude exceeded
    /// [`TRUNCATION_THRESHOLD`] of the peak.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub alpha: f64,
    pub dt: f64,
    pub dealias: Dealias,
    pub nonlinear: bool,
    pub u0: RealField,
    pub frames: Vec<Frame>,
    /// `(t, ‖u(t)‖²_{L²})` after every step, starting at `t = 0`.
    pub energy: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn grid(&self) -> &GridRef {
        self.u0.grid()
    }

    pub fn times(&self) -> Vec<f64> {
        self.frames.iter().map(|f| f.t).collect()
    }

    /// Frame whose time is within `1e-9·max(1, t)` of `t`.
    pub fn frame_at(&self, t: f64) -> Option<&Frame> {
        self.frames
            .iter()
            .find(|f| (f.t - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    /// Builds a trajectory from already computed frames, e.g. synthetic data.
    pub fn from_fields(alpha: f64, frames: Vec<(f64, RealField)>) -> Result<Self> {
        let u0 = frames
            .first()
            .map(|(_, f)| f.clone())
            .ok_or_else(|| Error::InsufficientFrames("no frames".into()))?;
        if frames.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Parameter("frame times must increase strictly".into()));
        }
        let frames = frames
            .into_iter()
            .map(|(t, field)| Frame {
                t,
                diagnostics: Diagnostics::of(&field),
                field,
                truncated: false,
            })
            .collect();
        Ok(Trajectory {
            alpha,
            dt: f64::NAN,
            dealias: Dealias::TwoThirds,
            nonlinear: true,
            u0,
            frames,
            energy: Vec::new(),
            warnings: Vec::new(),
        })
    }
}

/// Precomputed symbols and scratch space for repeated steps on one grid.
pub struct Stepper {
    grid: GridRef,
    full: Vec<Complex64>,
    half: Vec<Complex64>,
    advect: Vec<Complex64>,
    mask: Option<Vec<f64>>,
    nonlinear: bool,
    dt: f64,
    work: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl Stepper {
    pub fn new(grid: &GridRef, alpha: f64, dt: f64, dealias: Dealias, nonlinear: bool) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
        }
        let sigma = grid.linear_symbol(alpha)?;
        let full = sigma.iter().map(|s| (s * dt).exp()).collect();
        let half = sigma.iter().map(|s| (s * (0.5 * dt)).exp()).collect();
        let advect = grid
            .derivative_symbol(1)
            .into_iter()
            .map(|d| d * -0.5)
            .collect();
        Ok(Stepper {
            grid: grid.clone(),
            full,
            half,
            advect,
            mask: dealias.mask(grid),
            nonlinear,
            dt,
            work: vec![Complex64::default(); grid.n()],
            scratch: vec![Complex64::default(); grid.scratch_len()],
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `-(iξ/2) F[u²]` with the dealiasing filter applied on both sides.
    pub fn nonlinear_into(&mut self, v: &[Complex64], out: &mut [Complex64]) {
        let grid = &self.grid;
        self.work.copy_from_slice(v);
        if let Some(m) = &self.mask {
            for (w, f) in self.work.iter_mut().zip(m) {
                *w *= f;
            }
        }
        grid.inverse_in_place(&mut self.work, &mut self.scratch);
        for w in self.work.iter_mut() {
            *w = Complex64::new(w.re * w.re, 0.0);
        }
        grid.forward_in_place(&mut self.work, &mut self.scratch);
        match &self.mask {
            Some(m) => {
                for (((o, w), a), m) in out.iter_mut().zip(&self.work).zip(&self.advect).zip(m) {
                    *o = w * a * m;
                }
            }
            None => {
                for ((o, w), a) in out.iter_mut().zip(&self.work).zip(&self.advect) {
                    *o = w * a;
                }
            }
        }
    }

    /// One RK4 step for `v' = σv + f`, where the forcing at each stage is
    /// supplied by `forcing(stage, Y_stage, out)`. Returns the four stage values.
    fn step_with(
        &mut self,
        v: &mut [Complex64],
        mut forcing: impl FnMut(&mut Self, usize, &[Complex64], &mut [Complex64]),
    ) -> [Vec<Complex64>; 4] {
        let n = v.len();
        let dt = self.dt;
        let mut y = [v.to_vec(), vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n]];
        let mut k1 = vec![Complex64::default(); n];
        let mut k2 = vec![Complex64::default(); n];
        let mut k3 = vec![Complex64::default(); n];
        let mut k4 = vec![Complex64::default(); n];
        forcing(self, 0, &y[0], &mut k1);
        for i in 0..n {
            y[1][i] = self.half[i] * (v[i] + 0.5 * dt * k1[i]);
        }
        forcing(self, 1, &y[1], &mut k2);
        for i in 0..n {
            y[2][i] = self.half[i] * v[i] + 0.5 * dt * k2[i];
        }
        forcing(self, 2, &y[2], &mut k3);
        for i in 0..n {
            y[3][i] = self.full[i] * v[i] + dt * self.half[i] * k3[i];
        }
        forcing(self, 3, &y[3], &mut k4);
        for i in 0..n {
            v[i] = self.full[i] * v[i]
                + dt / 6.0 * (self.full[i] * k1[i] + 2.0 * self.half[i] * (k2[i] + k3[i]) + k4[i]);
        }
        y
    }

    /// Advances `v` by one step of the full (or linear) equation.
    pub fn step(&mut self, v: &mut [Complex64]) {
        let nonlinear = self.nonlinear;
        self.step_with(v, |s, _, y, out| {
            if nonlinear {
                s.nonlinear_into(y, out);
            } else {
                out.fill(Complex64::default());
            }
        });
    }

    /// Advances a Picard ladder `v[0..]` by one step: level 0 is the free flow
    /// and level `m+1` is forced by the nonlinearity of level `m`'s stage values.
    pub fn step_ladder(&mut self, levels: &mut [Vec<Complex64>]) {
        let mut prev: Option<[Vec<Complex64>; 4]> = None;
        for level in levels.iter_mut() {
            let stages = match prev.take() {
                None => self.step_with(level, |_, _, _, out| out.fill(Complex64::default())),
                Some(lower) => self.step_with(level, |s, k, _, out| s.nonlinear_into(&lower[k], out)),
            };
            prev = Some(stages);
        }
    }
}

/// `-(iξ/2) F[u²]` for a spectral field.
pub fn nonlinear_term(f: &SpectralField, dealias: Dealias) -> SpectralField {
    let grid = f.grid().clone();
    let mut stepper = Stepper::new(&grid, 1.0, 1.0, dealias, true).expect("valid symbols");
    let mut out = vec![Complex64::default(); grid.n()];
    stepper.nonlinear_into(f.coeffs(), &mut out);
    SpectralField::new(grid, out).expect("matching length")
}

/// One integrating-factor RK4 step of size `dt`.
pub fn step_ifrk4(
    f: &SpectralField,
    alpha: f64,
    dt: f64,
    dealias: Dealias,
    nonlinear: bool,
) -> Result<SpectralField> {
    let grid = f.grid().clone();
    let mut stepper = Stepper::new(&grid, alpha, dt, dealias, nonlinear)?;
    let mut v = f.coeffs().to_vec();
    stepper.step(&mut v);
    if v.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NumericalAbort { t: dt });
    }
    SpectralField::new(grid, v)
}

fn energy_of(v: &[Complex64], length: f64) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>() / length
}

fn finite(v: &[Complex64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

pub(crate) struct FrameRecorder {
    truncated: bool,
    pub frames: Vec<Frame>,
    pub warnings: Vec<String>,
}

impl FrameRecorder {
    pub fn new() -> Self {
        FrameRecorder {
            truncated: false,
            frames: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn record(&mut self, grid: &GridRef, t: f64, v: &[Complex64]) -> Result<()> {
        let field = SpectralField::new(grid.clone(), v.to_vec())?.to_physical();
        let diagnostics = Diagnostics::of(&field);
        if !self.truncated && diagnostics.boundary > TRUNCATION_THRESHOLD * diagnostics.linf {
            self.truncated = true;
            self.warnings.push(format!(
                "boundary amplitude reached {:.3e} of the peak at t = {t:.4} (threshold {:e}); later frames are flagged",
                diagnostics.boundary / diagnostics.linf,
                TRUNCATION_THRESHOLD
            ));
        }
        self.frames.push(Frame {
            t,
            field,
            diagnostics,
            truncated: self.truncated,
        });
        Ok(())
    }
}

/// Integrates the equation from `u0` and records the requested frames.
pub fn simulate(u0: &RealField, config: &SolverConfig) -> Result<Trajectory> {
    let (dt, steps) = config.resolve(u0)?;
    let grid = u0.grid().clone();
    let mut stepper = Stepper::new(&grid, config.alpha, dt, config.dealias, config.nonlinear)?;
    let outputs = config.output_steps(dt, steps);
    let mut next = outputs.iter().peekable();
    let mut v = u0.to_spectral().into_coeffs();
    let mut rec = FrameRecorder::new();
    let mut energy = Vec::with_capacity(steps + 1);
    energy.push((0.0, energy_of(&v, grid.length())));
    if next.peek() == Some(&&0) {
        next.next();
        rec.frames.push(Frame {
            t: 0.0,
            field: u0.clone(),
            diagnostics: Diagnostics::of(u0),
            truncated: false,
        });
    }
    for s in 1..=steps {
        stepper.step(&mut v);
        let t = s as f64 * dt;
        if !finite(&v) {
            return Err(Error::NumericalAbort { t });
        }
        energy.push((t, energy_of(&v, grid.length())));
        if next.peek() == Some(&&s) {
            next.next();
            rec.record(&grid, t, &v)?;
        }
    }
    Ok(Trajectory {
        alpha: config.alpha,
        dt,
        dealias: config.dealias,
        nonlinear: config.nonlinear,
        u0: u0.clone(),
        frames: rec.frames,
        energy,
        warnings: rec.warnings,
    })
}

/// Uniformly spaced frames on `[0, t]` with an even number of intervals.
pub(crate) fn simpson_frames(traj: &Trajectory, t: f64) -> Result<Vec<&Frame>> {
    let frames: Vec<&Frame> = traj
        .frames
        .iter()
        .filter(|f| f.t <= t * (1.0 + 1e-12) + 1e-12)
        .collect();
    if frames.len() < 3 {
        return Err(Error::InsufficientFrames(format!(
            "need at least 3 frames on [0, {t}], found {}",
            frames.len()
        )));
    }
    if frames[0].t != 0.0 {
        return Err(Error::InsufficientFrames("the first frame must be at t = 0".into()));
    }
    let last = frames[frames.len() - 1].t;
    if (last - t).abs() > 1e-9 * t.max(1.0) {
        return Err(Error::InsufficientFrames(format!("no frame at t = {t}")));
    }
    let intervals = frames.len() - 1;
    if !intervals.is_multiple_of(2) {
        return Err(Error::InsufficientFrames(format!(
            "Simpson's rule needs an even number of intervals, found {intervals}"
        )));
    }
    let h = last / intervals as f64;
    if frames
        .iter()
        .enumerate()
        .any(|(i, f)| (f.t - i as f64 * h).abs() > 1e-9 * h.max(1.0))
    {
        return Err(Error::InsufficientFrames("frames are not uniformly spaced".into()));
    }
    Ok(frames)
}

pub(crate) fn simpson_weight(i: usize, intervals: usize) -> f64 {
    if i == 0 || i == intervals {
        1.0
    } else if i % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// `‖u(t) - S_α(t)∗u₀ + ½∫₀ᵗ S_α(t-s)∗∂_x u²(s) ds‖_{L²}` with the time integral
/// taken by composite Simpson over the stored frames on `[0, t]`.
pub fn duhamel_residual(traj: &Trajectory, alpha: f64, t: f64) -> Result<f64> {
    let frames = simpson_frames(traj, t)?;
    let grid = traj.grid().clone();
    let sigma = grid.linear_symbol(alpha)?;
    let intervals = frames.len() - 1;
    let h = t / intervals as f64;
    let n = grid.n();
    let u_t = frames[intervals].field.to_spectral();
    let u0 = traj.u0.to_spectral();
    let mut resid: Vec<Complex64> = (0..n)
        .map(|i| u_t.coeffs()[i] - (sigma[i] * t).exp() * u0.coeffs()[i])
        .collect();
    if traj.nonlinear {
        let mut stepper = Stepper::new(&grid, alpha, 1.0, traj.dealias, true)?;
        let mut nl = vec![Complex64::default(); n];
        for (i, f) in frames.iter().enumerate() {
            let w = simpson_weight(i, intervals) * h / 3.0;
            let coeffs = f.field.to_spectral().into_coeffs();
            stepper.nonlinear_into(&coeffs, &mut nl);
            for k in 0..n {
                resid[k] -= (sigma[k] * (t - f.t)).exp() * nl[k] * w;
            }
        }
    }
    Ok(SpectralField::new(grid, resid)?.l2_norm())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameCheck {
    pub t: f64,
    pub l1_nonincreasing: bool,
    pub l2_nonincreasing: bool,
    /// `None` when `α < 1`, where the bound is not claimed.
    pub max_principle: Option<bool>,
    pub mass_conserved: bool,
    /// `max(max u - sup u₀, inf u₀ - min u, 0) / (sup u₀ - inf u₀)`.
    pub overshoot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    pub frames: Vec<FrameCheck>,
    pub max_mass_drift: f64,
    pub max_l1_growth: f64,
    pub max_l2_growth: f64,
    pub max_overshoot: f64,
    /// Upward excursion alone, `max u - sup u₀`, relative to the range.
    pub max_upper_overshoot: f64,
}

pub const L1_TOL: f64 = 1e-8;
pub const L2_TOL: f64 = 1e-12;
pub const MAX_PRINCIPLE_TOL: f64 = 1e-8;
pub const MASS_TOL: f64 = 1e-10;

impl InvariantReport {
    pub fn mass_ok(&self) -> bool {
        self.frames.iter().all(|f| f.mass_conserved)
    }
    pub fn l1_ok(&self) -> bool {
        self.frames.iter().all(|f| f.l1_nonincreasing)
    }
    pub fn l2_ok(&self) -> bool {
        self.frames.iter().all(|f| f.l2_nonincreasing)
    }
    /// True when no asserted frame violates the bound; vacuous for `α < 1`.
    pub fn max_principle_ok(&self) -> bool {
        self.frames.iter().all(|f| f.max_principle != Some(false))
    }
}

/// Per-frame structural checks against the previous frame and the initial data.
pub fn invariant_report(traj: &Trajectory) -> InvariantReport {
    let d0 = Diagnostics::of(&traj.u0);
    let range = (d0.max - d0.min).max(f64::MIN_POSITIVE);
    let mass_scale = d0.mass.abs().max(d0.l1 * 1e-3).max(f64::MIN_POSITIVE);
    let mut prev = d0;
    let mut report = InvariantReport {
        frames: Vec::with_capacity(traj.frames.len()),
        max_mass_drift: 0.0,
        max_l1_growth: 0.0,
        max_l2_growth: 0.0,
        max_overshoot: 0.0,
        max_upper_overshoot: 0.0,
    };
    for f in &traj.frames {
        let d = f.diagnostics;
        let drift = (d.mass - d0.mass).abs() / mass_scale;
        let l1_growth = if prev.l1 > 0.0 { (d.l1 - prev.l1) / prev.l1 } else { d.l1 };
        let l2_growth = if prev.l2 > 0.0 { (d.l2 - prev.l2) / prev.l2 } else { d.l2 };
        let upper = (d.max - d0.max) / range;
        let lower = (d0.min - d.min) / range;
        let overshoot = upper.max(lower).max(0.0);
        report.max_mass_drift = report.max_mass_drift.max(drift);
        report.max_l1_growth = report.max_l1_growth.max(l1_growth);
        report.max_l2_growth = report.max_l2_growth.max(l2_growth);
        report.max_overshoot = report.max_overshoot.max(overshoot);
        report.max_upper_overshoot = report.max_upper_overshoot.max(upper.max(0.0));
        report.frames.push(FrameCheck {
            t: f.t,
            l1_nonincreasing: l1_growth <= L1_TOL,
            l2_nonincreasing: l2_growth <= L2_TOL,
            max_principle: (traj.alpha >= 1.0).then_some(overshoot <= MAX_PRINCIPLE_TOL),
            mass_conserved: drift <= MASS_TOL,
            overshoot,
        });
        prev = d;
    }
    report
}
