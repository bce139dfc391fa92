use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dkdv_cli::experiment::Status;
use dkdv_cli::{output, run_configs, CliError};
use dkdv_core::acceptance::{all_ids, run_selected, Faults};
use dkdv_core::fit::fit_power_law;
use dkdv_core::kernels::{eval_quadrature_tol, KernelKind, QUADRATURE_TOL};

#[derive(Parser)]
#[command(name = "dkdv", version, about = "Decay experiments for the dissipative KdV equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    /// the dissipative kernel G
    Heat,
    /// the dissipative-dispersive kernel S
    Full,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiment configs; artifacts go below $DKDV_OUTPUT_ROOT (default ".").
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Verify {
        /// Comma-separated criterion ids, e.g. `1,2,12`.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        only: Option<Vec<String>>,
        /// Fault injection: filter the nonlinear term at n/6 instead of 2n/3.
        #[arg(long)]
        corrupt_dealias: bool,
        /// Print every check, not only failing ones.
        #[arg(long, short)]
        verbose: bool,
    },
    /// Evaluate a kernel at one point by oscillatory quadrature.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, value_enum, default_value = "heat")]
        kind: Kind,
        #[arg(long, default_value_t = QUADRATURE_TOL)]
        tol: f64,
    },
    /// Fit power laws to a series CSV, one line per (p, j).
    Fit {
        csv: PathBuf,
        /// Closed window `a:b`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
        /// Fit `value / log t` instead of `value`.
        #[arg(long)]
        log: bool,
    },
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("dkdv: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { configs } => run(&configs),
        Command::Verify { only, corrupt_dealias, verbose } => verify(only, corrupt_dealias, verbose),
        Command::Kernel { alpha, t, x, kind, tol } => {
            let kind = match kind {
                Kind::Heat => KernelKind::Heat,
                Kind::Full => KernelKind::Full,
            };
            match eval_quadrature_tol(kind, alpha, t, x, tol) {
                Ok(v) => {
                    println!("{v:.16e}");
                    ExitCode::SUCCESS
                }
                Err(e @ dkdv_core::Error::Quadrature { .. }) => fail(&CliError::Numerical(e.to_string())),
                Err(e) => fail(&CliError::Config(e.to_string())),
            }
        }
        Command::Fit { csv, window, log } => fit(&csv, &window, log),
    }
}

fn run(configs: &[PathBuf]) -> ExitCode {
    let root = output::output_root();
    let results = match run_configs(configs, &root) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let mut code = 0u8;
    for (path, r) in configs.iter().zip(results) {
        match r {
            Ok((report, artifacts)) => {
                println!(
                    "{} [{}] {} ({:.1} s) -> {}",
                    report.name,
                    report.status.label(),
                    report.experiment,
                    report.wall_time_s,
                    artifacts.dir.display()
                );
                for s in report.series.iter().filter(|s| !s.passed) {
                    println!("    p={} j={}: slope {:.4}, predicted {:.4} ± {}", s.p, s.j, s.slope, s.predicted, s.tolerance);
                }
                for p in report.profiles.iter().filter(|p| !p.passed) {
                    println!("    p={} j={}: spearman {:.3} > -{}", p.p, p.j, p.spearman, p.threshold);
                }
                for c in report.checks.iter().filter(|c| !c.passed) {
                    println!("    {}: {:.3e} > {:.1e}", c.name, c.value, c.bound);
                }
                for w in &report.warnings {
                    println!("    warning: {w}");
                }
                if report.status == Status::Fail {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("dkdv: {}: {e}", path.display());
                code = code.max(e.exit_code() as u8);
            }
        }
    }
    ExitCode::from(code)
}

fn verify(only: Option<Vec<String>>, corrupt_dealias: bool, verbose: bool) -> ExitCode {
    let ids = match only {
        None => all_ids(),
        Some(list) => {
            let mut ids = Vec::new();
            for s in list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
                match s.parse::<u8>() {
                    Ok(id) => ids.push(id),
                    Err(_) => return fail(&CliError::Config(format!("--only: {s:?} is not a criterion id"))),
                }
            }
            ids
        }
    };
    let faults = Faults { corrupt_dealias };
    let outcomes = run_selected(&ids, faults, |o| {
        println!("{}", o.summary_line());
        for c in o.checks.iter().filter(|c| verbose || !c.passed) {
            println!("    {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
    });
    match outcomes {
        Ok(outcomes) => {
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{passed}/{} criteria passed", outcomes.len());
            if passed == outcomes.len() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&CliError::Config(e.to_string())),
    }
}

fn fit(csv: &std::path::Path, window: &str, log: bool) -> ExitCode {
    let parsed = window
        .split_once(':')
        .and_then(|(a, b)| Some((a.trim().parse::<f64>().ok()?, b.trim().parse::<f64>().ok()?)));
    let Some(window) = parsed else {
        return fail(&CliError::Config(format!("--window: expected a:b, got {window:?}")));
    };
    let rows = match output::read_csv(csv) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    if rows.is_empty() {
        return fail(&CliError::Config(format!("{}: no rows", csv.display())));
    }
    for (p, j, times, values) in output::group(&rows) {
        match fit_power_law(&times, &values, window, log) {
            Ok(f) => println!(
                "p={} j={j} slope={} intercept={} r_squared={} points={}",
                p.label(),
                f.slope,
                f.intercept,
                f.r_squared,
                f.points
            ),
            Err(e) => return fail(&CliError::Config(format!("p={} j={j}: {e}", p.label()))),
        }
    }
    ExitCode::SUCCESS
}
