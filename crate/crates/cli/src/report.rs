//! Report files: the results.csv row schema, trace/solution/path files, and
//! the run manifest. Floats are serialized with 17 significant digits so
//! values round-trip bit-exactly; bitmasks are 0x-prefixed hex.

use crate::CliError;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::Path;

pub const RESULTS_HEADER: &str =
    "experiment,solver,n,k,seed,objective,wall_seconds,iterations,support";

/// 17 significant digits: one leading digit plus 16 after the point.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// One line of results.csv.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub experiment: String,
    pub solver: String,
    pub n: usize,
    pub k: Option<usize>,
    pub seed: u64,
    pub objective: f64,
    pub wall_seconds: f64,
    pub iterations: usize,
    pub support: String,
}

impl ReportRow {
    pub fn to_csv(&self) -> String {
        let k = self.k.map(|k| k.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.solver,
            self.n,
            k,
            self.seed,
            fmt_float(self.objective),
            fmt_float(self.wall_seconds),
            self.iterations,
            self.support
        )
    }

    pub fn from_csv(line: &str) -> Result<Self, CliError> {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(CliError::Config(format!(
                "results row has {} fields, expected 9: {line}",
                fields.len()
            )));
        }
        let bad = |what: &str| CliError::Config(format!("bad {what} in results row: {line}"));
        Ok(ReportRow {
            experiment: fields[0].to_string(),
            solver: fields[1].to_string(),
            n: fields[2].parse().map_err(|_| bad("n"))?,
            k: if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].parse().map_err(|_| bad("k"))?)
            },
            seed: fields[4].parse().map_err(|_| bad("seed"))?,
            objective: fields[5].parse().map_err(|_| bad("objective"))?,
            wall_seconds: fields[6].parse().map_err(|_| bad("wall_seconds"))?,
            iterations: fields[7].parse().map_err(|_| bad("iterations"))?,
            support: fields[8].to_string(),
        })
    }
}

pub fn write_results(path: &Path, rows: &[ReportRow]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, RESULTS_HEADER);
    for row in rows {
        writeln_str(&mut out, &row.to_csv());
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_trace(
    path: &Path,
    trace: &[latsel_core::baselines::TraceRow],
) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, "iteration,objective,elapsed_seconds");
    for row in trace {
        writeln_str(
            &mut out,
            &format!(
                "{},{},{}",
                row.iteration,
                fmt_float(row.objective),
                fmt_float(row.elapsed)
            ),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_solution(path: &Path, x: &[f64]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, "index,x");
    for (i, v) in x.iter().enumerate() {
        writeln_str(&mut out, &format!("{i},{}", fmt_float(*v)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Path export: one row per regularization strength on the grid.
pub struct PathRow {
    pub mu: f64,
    pub support: String,
    pub w_value: f64,
    pub objective: f64,
}

pub fn write_path(path: &Path, rows: &[PathRow]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, "mu,subset,W_value,objective");
    for row in rows {
        writeln_str(
            &mut out,
            &format!(
                "{},{},{},{}",
                fmt_float(row.mu),
                row.support,
                fmt_float(row.w_value),
                fmt_float(row.objective)
            ),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

pub fn write_sweep_gaps(path: &Path, gaps: &[(usize, f64)]) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, "k,gap");
    for (k, gap) in gaps {
        writeln_str(&mut out, &format!("{k},{}", fmt_float(*gap)));
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Robust trace export: iterate, outer value, inner support.
pub fn write_robust_trace(
    path: &Path,
    trace: &latsel_core::robust::RobustTrace,
) -> Result<(), CliError> {
    let mut out = String::new();
    writeln_str(&mut out, "iteration,q_value,support");
    for (i, it) in trace.iterates.iter().enumerate() {
        writeln_str(
            &mut out,
            &format!(
                "{i},{},{}",
                fmt_float(it.q_value),
                it.inner_support.to_hex()
            ),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    config: &'a C,
    version: &'static str,
}

pub fn write_manifest<C: Serialize>(path: &Path, config: &C) -> Result<(), CliError> {
    let manifest = Manifest {
        config,
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| CliError::Config(format!("manifest serialization failed: {e}")))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn writeln_str(buf: &mut String, line: &str) {
    let _ = writeln!(buf, "{line}");
}
