//! Runs every acceptance criterion and prints one line per criterion.
//!
//! `DKDV_ACCEPT=1,4,12` restricts the run. The exit status is nonzero when a
//! criterion fails, unless it is listed in `KNOWN_FAILURES` below.

use dkdv_core::acceptance::{all_ids, run_selected, Faults};

/// Criteria that fail for reasons documented in the README: the measured
/// dynamics violate them, and loosening the tolerance would hide that.
const KNOWN_FAILURES: &[u8] = &[11];

fn main() {
    let ids: Vec<u8> = match std::env::var("DKDV_ACCEPT") {
        Ok(s) if !s.trim().is_empty() => s
            .split(',')
            .map(|t| t.trim().parse().expect("criterion ids are integers"))
            .collect(),
        _ => all_ids(),
    };
    let verbose = std::env::var_os("DKDV_ACCEPT_VERBOSE").is_some();
    let outcomes = run_selected(&ids, Faults::default(), |o| {
        println!("{}", o.summary_line());
        for c in &o.checks {
            if verbose || !c.passed {
                println!("    {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
        }
    })
    .expect("selection is valid");
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} criteria passed", outcomes.len());
    let unexpected: Vec<u8> = outcomes
        .iter()
        .filter(|o| !o.passed && !KNOWN_FAILURES.contains(&o.id))
        .map(|o| o.id)
        .collect();
    for o in outcomes.iter().filter(|o| !o.passed && KNOWN_FAILURES.contains(&o.id)) {
        println!("criterion {} fails as documented", o.id);
    }
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
