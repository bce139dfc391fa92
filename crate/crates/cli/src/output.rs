//! Series CSV, report JSON and gnuplot script.

use std::fs;
use std::path::{Path, PathBuf};

use dkdv_core::Lp;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::experiment::Report;

pub const CSV_NAME: &str = "series.csv";
pub const REPORT_NAME: &str = "report.json";
pub const PLOT_NAME: &str = "plot.gp";

/// One CSV line: `t,p,j,value,predicted`. `predicted` is the exponent the
/// series is tested against, empty for profiles and diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub t: f64,
    pub p: Lp,
    pub j: usize,
    pub value: f64,
    pub predicted: Option<f64>,
}

/// `$DKDV_OUTPUT_ROOT`, or the working directory.
pub fn output_root() -> PathBuf {
    std::env::var_os("DKDV_OUTPUT_ROOT")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."))
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv(path: &Path, rows: &[Row]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(e.to_string()))?;
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["t", "p", "j", "value", "predicted"]).map_err(io)?;
    for r in rows {
        let predicted = r.predicted.map(num).unwrap_or_default();
        w.write_record([num(r.t), r.p.label().to_string(), r.j.to_string(), num(r.value), predicted])
            .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: &Path) -> CliResult<Vec<Row>> {
    let bad = |line: usize, what: &str| CliError::Config(format!("{}: line {line}: {what}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::Config(e.to_string()))?;
    let headers = reader.headers().map_err(|e| CliError::Config(e.to_string()))?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols.len() < 4 || cols[..4] != ["t", "p", "j", "value"] || (cols.len() == 5 && cols[4] != "predicted") || cols.len() > 5 {
        return Err(bad(1, "expected header t,p,j,value[,predicted]"));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| bad(line, &e.to_string()))?;
        let t: f64 = rec[0].parse().map_err(|_| bad(line, "t is not a number"))?;
        let p = Lp::parse(&rec[1]).ok_or_else(|| bad(line, "p must be 1, 2 or inf"))?;
        let j: usize = rec[2].parse().map_err(|_| bad(line, "j is not a nonnegative integer"))?;
        let value: f64 = rec[3].parse().map_err(|_| bad(line, "value is not a number"))?;
        let predicted = match rec.get(4) {
            None | Some("") => None,
            Some(s) => Some(s.parse().map_err(|_| bad(line, "predicted is not a number"))?),
        };
        rows.push(Row { t, p, j, value, predicted });
    }
    Ok(rows)
}

/// Series in order of first appearance, as `(p, j, times, values)`.
pub fn group(rows: &[Row]) -> Vec<(Lp, usize, Vec<f64>, Vec<f64>)> {
    let mut out: Vec<(Lp, usize, Vec<f64>, Vec<f64>)> = Vec::new();
    for r in rows {
        match out.iter_mut().find(|g| g.0 == r.p && g.1 == r.j) {
            Some(g) => {
                g.2.push(r.t);
                g.3.push(r.value);
            }
            None => out.push((r.p, r.j, vec![r.t], vec![r.value])),
        }
    }
    out
}

fn plot_script(report: &Report, series: &[(Lp, usize)]) -> String {
    let mut s = String::new();
    s.push_str("# gnuplot script; run from this directory\n");
    s.push_str("set datafile separator \",\"\nset logscale xy\nset xlabel \"t\"\nset key outside right\n");
    s.push_str(&format!("set title \"{} ({})\"\n", report.name, report.experiment));
    s.push_str(&format!("set terminal pngcairo size 1000,640\nset output \"{}.png\"\n", report.name));
    let mut parts = Vec::new();
    for (i, (p, j)) in series.iter().enumerate() {
        parts.push(format!(
            "'{CSV_NAME}' every ::1 using 1:((strcol(2) eq \"{}\" && $3 == {j}) ? $4 : 1/0) with points pt 7 ps 0.6 title \"p={} j={j}\"",
            p.label(),
            p.label()
        ));
        if let Some(fit) = report.series.iter().find(|f| f.p == p.label() && f.j == *j) {
            let log = if fit.log_correction { "*log(x)" } else { "" };
            s.push_str(&format!("f{i}(x) = exp({:.16e})*x**({:.16e}){log}\n", fit.intercept, fit.slope));
            parts.push(format!(
                "[{}:{}] f{i}(x) with lines dt 2 title \"fit {:.3} (predicted {:.3})\"",
                fit.window[0], fit.window[1], fit.slope, fit.predicted
            ));
        }
    }
    s.push_str("plot ");
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifacts {
    pub dir: PathBuf,
    pub csv: PathBuf,
    pub report: PathBuf,
    pub plot: PathBuf,
}

pub fn write_all(dir: &Path, report: &Report, rows: &[Row], series: &[(Lp, usize)]) -> CliResult<Artifacts> {
    fs::create_dir_all(dir)?;
    let a = Artifacts {
        dir: dir.to_path_buf(),
        csv: dir.join(CSV_NAME),
        report: dir.join(REPORT_NAME),
        plot: dir.join(PLOT_NAME),
    };
    write_csv(&a.csv, rows)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(&a.report, json + "\n")?;
    fs::write(&a.plot, plot_script(report, series))?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let rows: Vec<Row> = (1..50)
            .map(|k| Row {
                t: k as f64 * 0.1,
                p: if k % 3 == 0 { Lp::Inf } else { Lp::Two },
                j: k % 2,
                value: (k as f64).sqrt().exp() * 1e-7 / 3.0,
                predicted: (k % 5 != 0).then_some(-1.0 / 3.0),
            })
            .collect();
        write_csv(&path, &rows).unwrap();
        assert_eq!(read_csv(&path).unwrap(), rows);
        let g = group(&rows);
        assert_eq!(g.len(), 4);
        assert_eq!(g.iter().map(|x| x.2.len()).sum::<usize>(), rows.len());
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        fs::write(&path, "time,p,j,value\n1,2,0,1\n").unwrap();
        assert!(matches!(read_csv(&path), Err(CliError::Config(_))));
    }
}
