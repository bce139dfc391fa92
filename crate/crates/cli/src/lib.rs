//! Experiment runner behind the `dkdv` binary.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;

use std::path::{Path, PathBuf};

pub use error::{CliError, CliResult};

/// Validates every config, then runs them in parallel and writes artifacts
/// below `root`. No experiment runs unless all configs validate.
pub fn run_configs(
    paths: &[PathBuf],
    root: &Path,
) -> CliResult<Vec<CliResult<(experiment::Report, output::Artifacts)>>> {
    let validated = paths.iter().map(|p| config::load(p)).collect::<CliResult<Vec<_>>>()?;
    let results = std::thread::scope(|s| {
        let handles: Vec<_> = validated
            .iter()
            .map(|v| s.spawn(move || experiment::run(v)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("experiment thread panicked"))
            .collect::<Vec<_>>()
    });
    // one writer, in config order
    Ok(validated
        .iter()
        .zip(results)
        .map(|(v, r)| {
            let (report, rows) = r?;
            let artifacts = output::write_all(&root.join(&v.output), &report, &rows, &v.series)?;
            Ok((report, artifacts))
        })
        .collect())
}
