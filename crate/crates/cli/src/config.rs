//! Experiment configuration: versioned JSON, unknown keys rejected, every
//! precondition checked before any compute.

use std::path::Path;

use dkdv_core::initial::{InitialData, Shape};
use dkdv_core::fit::MIN_FIT_POINTS;
use dkdv_core::linear::log_spaced;
use dkdv_core::picard::picard_order;
use dkdv_core::solver::{Dealias, SolverConfig};
use dkdv_core::{make_grid, Error, GridRef, Lp, RealField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    KernelCheck,
    LinearExpansion,
    Decay,
    FirstOrder,
    ProfileSub1,
    ProfileLog,
    Picard,
    Invariants,
}

impl ExperimentKind {
    pub fn label(self) -> &'static str {
        match self {
            ExperimentKind::KernelCheck => "kernel-check",
            ExperimentKind::LinearExpansion => "linear-expansion",
            ExperimentKind::Decay => "decay",
            ExperimentKind::FirstOrder => "first-order",
            ExperimentKind::ProfileSub1 => "profile-sub1",
            ExperimentKind::ProfileLog => "profile-log",
            ExperimentKind::Picard => "picard",
            ExperimentKind::Invariants => "invariants",
        }
    }

    fn needs_solver(self) -> bool {
        !matches!(self, ExperimentKind::KernelCheck | ExperimentKind::LinearExpansion)
    }

    fn default_tolerance(self) -> f64 {
        match self {
            ExperimentKind::KernelCheck => 0.02,
            ExperimentKind::LinearExpansion => 0.15,
            ExperimentKind::Decay | ExperimentKind::FirstOrder => 0.1,
            ExperimentKind::Picard => 0.12,
            ExperimentKind::ProfileSub1 => 0.5,
            ExperimentKind::ProfileLog => 0.15,
            ExperimentKind::Invariants => 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<f64>,
    /// Box length in units of π.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length_over_pi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSpec {
    pub shape: String,
    /// Exactly one of `amplitude` and `mass`; `mass` only for the Gaussian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
    #[serde(default)]
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    pub t_final: f64,
    /// Uniformly spaced frames on `[0, t_final]`; ignored when `output_times` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_times: Option<Vec<f64>>,
    /// `"two-thirds"`, `"none"` or a mode cutoff `"cutoff:K"`.
    #[serde(default = "default_dealias")]
    pub dealias: String,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
}

fn default_dealias() -> String {
    "two-thirds".into()
}

fn default_cfl() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSpec {
    /// `1`, `2` or `"inf"`.
    pub p: serde_json::Value,
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: u32,
    pub name: String,
    pub experiment: ExperimentKind,
    pub alpha: f64,
    pub grid: GridSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub series: Vec<SeriesSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    /// Sample times for the kernel and linear experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Expansion order, or the Picard level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Seed for the randomized checks of the invariants experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Output directory below the output root; defaults to `name`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

/// A configuration whose preconditions all hold.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: ExperimentConfig,
    pub grid: GridRef,
    pub u0: Option<RealField>,
    pub solver: Option<SolverConfig>,
    pub series: Vec<(Lp, usize)>,
    pub window: (f64, f64),
    pub times: Vec<f64>,
    pub order: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub output: String,
}

pub fn load(path: &Path) -> CliResult<Validated> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> CliResult<Validated> {
    let config: ExperimentConfig = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))?;
    validate(config)
}

fn parse_lp(v: &serde_json::Value) -> Option<Lp> {
    match v {
        serde_json::Value::Number(n) => match n.as_f64() {
            Some(1.0) => Some(Lp::One),
            Some(2.0) => Some(Lp::Two),
            _ => None,
        },
        serde_json::Value::String(s) => Lp::parse(s),
        _ => None,
    }
}

fn parse_dealias(s: &str, n: usize) -> Option<Dealias> {
    match s {
        "two-thirds" => Some(Dealias::TwoThirds),
        "none" => Some(Dealias::None),
        _ => {
            let k: usize = s.strip_prefix("cutoff:")?.parse().ok()?;
            (k <= n / 2).then_some(Dealias::Cutoff(k))
        }
    }
}

fn core(field: &str) -> impl Fn(Error) -> CliError + '_ {
    move |e| CliError::config(field, e)
}

pub fn validate(config: ExperimentConfig) -> CliResult<Validated> {
    use ExperimentKind::*;
    if config.schema != SCHEMA {
        return Err(CliError::config("schema", format!("expected {SCHEMA}, found {}", config.schema)));
    }
    if config.name.is_empty() || config.name.contains(['/', '\\']) {
        return Err(CliError::config("name", "must be a nonempty plain name"));
    }
    let kind = config.experiment;
    let alpha = config.alpha;
    let alpha_ok = match kind {
        KernelCheck => alpha > 0.0 && alpha <= 2.0,
        ProfileSub1 => alpha > 0.0 && alpha < 1.0,
        ProfileLog => alpha == 1.0,
        Picard => alpha > 1.0 && alpha < 2.0,
        _ => alpha > 0.0 && alpha < 2.0,
    };
    if !alpha_ok || !alpha.is_finite() {
        let range = match kind {
            KernelCheck => "(0, 2]",
            ProfileSub1 => "(0, 1)",
            ProfileLog => "exactly 1",
            Picard => "(1, 2)",
            _ => "(0, 2)",
        };
        return Err(CliError::config("alpha", format!("{alpha} outside {range} for {}", kind.label())));
    }

    let length = match (config.grid.length, config.grid.length_over_pi) {
        (Some(l), None) => l,
        (None, Some(k)) => k * std::f64::consts::PI,
        _ => return Err(CliError::config("grid", "give exactly one of length and length_over_pi")),
    };
    let grid = make_grid(config.grid.n, length).map_err(core("grid"))?;

    let u0 = match (&config.initial, kind) {
        (None, KernelCheck) => None,
        (None, _) => return Err(CliError::config("initial", "required for this experiment")),
        (Some(spec), _) => Some(initial_field(spec, &grid)?),
    };

    let tolerance = config.tolerance.unwrap_or(kind.default_tolerance());
    if !(tolerance > 0.0) || !tolerance.is_finite() {
        return Err(CliError::config("tolerance", "must be positive"));
    }

    let solver = match (&config.solver, kind.needs_solver()) {
        (_, false) => None,
        (None, true) => return Err(CliError::config("solver", "required for this experiment")),
        (Some(s), true) => {
            let u0 = u0.as_ref().expect("initial data checked above");
            Some(solver_config(s, alpha, &grid, u0)?)
        }
    };

    let t_final = solver.as_ref().map(|s| s.t_final);
    let times = match kind {
        KernelCheck | LinearExpansion => {
            let times = config.times.clone().unwrap_or_else(|| match kind {
                KernelCheck => log_spaced(1.0, 4.0, 5),
                _ => log_spaced(4.0, 256.0, 16),
            });
            if times.len() < 2 || times.windows(2).any(|w| !(w[1] > w[0])) {
                return Err(CliError::config("times", "need at least two strictly increasing times"));
            }
            if times.len() < MIN_FIT_POINTS {
                return Err(CliError::config("times", format!("need at least {MIN_FIT_POINTS} times for a fit")));
            }
            let (ok, rule) = match kind {
                LinearExpansion => (times.iter().all(|&t| t >= 1.0), ">= 1"),
                _ => (times.iter().all(|&t| t > 0.0), "> 0"),
            };
            if !ok {
                return Err(CliError::config("times", format!("times must be {rule}")));
            }
            times
        }
        _ => {
            if config.times.is_some() {
                return Err(CliError::config("times", "only used by kernel-check and linear-expansion"));
            }
            Vec::new()
        }
    };

    let window = match config.window {
        Some([a, b]) => (a, b),
        None => match kind {
            KernelCheck | LinearExpansion => (times[0], *times.last().unwrap()),
            ProfileLog => (50.0_f64.min(0.5 * t_final.unwrap()), t_final.unwrap()),
            _ => (0.1 * t_final.unwrap(), t_final.unwrap()),
        },
    };
    if !(window.0 < window.1) || !(window.0 >= 0.0) {
        return Err(CliError::config("window", format!("{window:?} is not an interval in [0, ∞)")));
    }
    if let Some(t) = t_final {
        if window.1 > t * (1.0 + 1e-12) {
            return Err(CliError::config("window", format!("ends after solver.t_final = {t}")));
        }
    }
    if kind == ProfileLog && !(window.0 > 1.0) {
        return Err(CliError::config("window", "the log profile needs t > 1"));
    }

    let mut series = Vec::new();
    for (i, s) in config.series.iter().enumerate() {
        let p = parse_lp(&s.p)
            .ok_or_else(|| CliError::config(&format!("series[{i}].p"), "expected 1, 2 or \"inf\""))?;
        series.push((p, s.j));
    }
    if series.is_empty() {
        series = match kind {
            KernelCheck => Lp::ALL.iter().flat_map(|&p| (0..=2).map(move |j| (p, j))).collect(),
            _ => vec![(Lp::Two, 0)],
        };
    }

    let order = match kind {
        LinearExpansion => config.order.unwrap_or(1),
        Picard => config.order.unwrap_or(picard_order(alpha).map_err(core("alpha"))?.order + 1),
        _ => {
            if config.order.is_some() {
                return Err(CliError::config("order", "only used by linear-expansion and picard"));
            }
            0
        }
    };
    if kind == Picard && order == 0 {
        return Err(CliError::config("order", "the Picard level must be at least 1"));
    }
    if kind == LinearExpansion && order > 8 {
        return Err(CliError::config("order", "expansion orders above 8 are not supported"));
    }

    let output = config.output.clone().unwrap_or_else(|| config.name.clone());
    if Path::new(&output).is_absolute() || output.split(['/', '\\']).any(|c| c == "..") {
        return Err(CliError::config("output", "must be a relative path below the output root"));
    }
    let seed = config.seed.unwrap_or(0);
    Ok(Validated {
        config,
        grid,
        u0,
        solver,
        series,
        window,
        times,
        order,
        tolerance,
        seed,
        output,
    })
}

fn initial_field(spec: &InitialSpec, grid: &GridRef) -> CliResult<RealField> {
    let shape = Shape::parse(&spec.shape)
        .ok_or_else(|| CliError::config("initial.shape", format!("unknown shape {:?}", spec.shape)))?;
    let data = match (spec.amplitude, spec.mass) {
        (Some(a), None) => InitialData {
            shape,
            amplitude: a,
            center: spec.center,
            width: spec.width,
        },
        (None, Some(m)) if shape == Shape::Gaussian => {
            let mut d = InitialData::gaussian_with_mass(m, spec.width);
            d.center = spec.center;
            d
        }
        (None, Some(_)) => return Err(CliError::config("initial.mass", "only the Gaussian is set by mass")),
        _ => return Err(CliError::config("initial", "give exactly one of amplitude and mass")),
    };
    let u0 = data.sample(grid).map_err(core("initial"))?;
    if !u0.decays_within(dkdv_core::spectral::DECAY_GUARD) {
        return Err(CliError::config("initial", "data not negligible at the box edge; widen the grid"));
    }
    Ok(u0)
}

fn solver_config(s: &SolverSpec, alpha: f64, grid: &GridRef, u0: &RealField) -> CliResult<SolverConfig> {
    let dealias = parse_dealias(&s.dealias, grid.n())
        .ok_or_else(|| CliError::config("solver.dealias", format!("unknown filter {:?}", s.dealias)))?;
    let mut cfg = match (&s.output_times, s.frames) {
        (Some(times), None) => SolverConfig::new(alpha, s.t_final, times.clone()),
        (None, frames) => SolverConfig::uniform(alpha, s.t_final, frames.unwrap_or(200)),
        (Some(_), Some(_)) => {
            return Err(CliError::config("solver", "give at most one of frames and output_times"))
        }
    };
    cfg.dealias = dealias;
    cfg.cfl_safety = s.cfl_safety;
    if let Some(dt) = s.dt {
        cfg = cfg.with_dt(dt);
    }
    cfg.resolve(u0).map_err(|e| match e {
        Error::Cfl { .. } => CliError::config("solver.dt", format!("cfl: {e}")),
        other => CliError::config("solver", other),
    })?;
    Ok(cfg)
}
