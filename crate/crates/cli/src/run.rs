//! Sweep execution and CSV output.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use coopsense::montecarlo::{estimate_schemes, RateEstimate, RunOptions, ScenarioEstimate};

use crate::error::{CliError, Result};
use crate::spec::ExperimentSpec;

pub const CSV_HEADER: &str = "sweep_value,scheme,pd,pd_lo,pd_hi,pf,pf_lo,pf_hi,qf,qm,qe,\
pd_analytic,pf_analytic,qe_analytic,steps_mean,trials,seed";

/// Command-line adjustments applied on top of a spec file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(seed) = self.seed {
            spec.scenario.seed = seed;
        }
        if let Some(trials) = self.trials {
            spec.scenario.trials = trials;
        }
    }
}

#[derive(Debug, Clone)]
pub struct Row {
    pub sweep_value: f64,
    pub estimate: ScenarioEstimate,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub axis: &'static str,
    pub path: PathBuf,
    pub rows: Vec<Row>,
}

/// Where results go: an explicit path wins, then the spec's `output`
/// relative to `out_dir`, then `<name>.csv` in `out_dir`.
pub fn output_path(spec: &ExperimentSpec, out: Option<&Path>, out_dir: Option<&Path>) -> PathBuf {
    if let Some(out) = out {
        return out.to_path_buf();
    }
    let file = spec
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", spec.name)));
    match out_dir {
        Some(dir) if file.is_relative() => dir.join(file),
        _ => file,
    }
}

/// Runs every sweep point and returns the rows, without writing anything.
pub fn execute(spec: &ExperimentSpec, workers: Option<usize>) -> Result<Vec<Row>> {
    let options = RunOptions { workers };
    let mut rows = Vec::new();
    for (value, scenario) in spec.scenarios()? {
        for estimate in estimate_schemes(&scenario, &spec.schemes, &options)? {
            rows.push(Row {
                sweep_value: value,
                estimate,
            });
        }
    }
    Ok(rows)
}

fn cell(out: &mut String, v: Option<f64>) {
    out.push(',');
    if let Some(v) = v {
        write!(out, "{v}").expect("writing to a String");
    }
}

fn rate_cells(out: &mut String, r: Option<RateEstimate>) {
    cell(out, r.map(|r| r.point));
    cell(out, r.map(|r| r.low));
    cell(out, r.map(|r| r.high));
}

pub fn render_csv(rows: &[Row]) -> String {
    let mut out = String::with_capacity(128 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let e = &row.estimate;
        write!(out, "{},{}", row.sweep_value, e.scheme.name()).expect("writing to a String");
        rate_cells(&mut out, e.pd);
        rate_cells(&mut out, e.pf);
        cell(&mut out, e.qf.map(|r| r.point));
        cell(&mut out, e.qm.map(|r| r.point));
        cell(&mut out, e.qe.map(|r| r.point));
        cell(&mut out, Some(e.analytic.pd.value()));
        cell(&mut out, Some(e.analytic.pf.value()));
        cell(&mut out, Some(e.analytic.cooperative.qe));
        cell(&mut out, Some(e.steps_mean));
        writeln!(out, ",{},{}", e.trials, e.seed).expect("writing to a String");
    }
    out
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let err = |source| CliError::Write {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(err)?;
    tmp.write_all(contents.as_bytes()).map_err(err)?;
    tmp.as_file().sync_all().map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Validates, runs and writes the result table for `spec`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    out: Option<&Path>,
    out_dir: Option<&Path>,
    workers: Option<usize>,
) -> Result<RunReport> {
    spec.validate()?;
    let path = output_path(spec, out, out_dir);
    let rows = execute(spec, workers)?;
    write_atomic(&path, &render_csv(&rows))?;
    Ok(RunReport {
        name: spec.name.clone(),
        axis: spec.sweep.axis.name(),
        path,
        rows,
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

/// Human-readable table of the headline rates.
pub fn summary(report: &RunReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "{}: {} rows -> {}",
        report.name,
        report.rows.len(),
        report.path.display()
    )
    .expect("writing to a String");
    writeln!(
        s,
        "{:>10} {:<20} {:>8} {:>8} {:>8} {:>8} {:>8}",
        report.axis, "scheme", "pd", "pf", "qf", "qm", "qe"
    )
    .expect("writing to a String");
    for row in &report.rows {
        let e = &row.estimate;
        writeln!(
            s,
            "{:>10} {:<20} {:>8} {:>8} {:>8} {:>8} {:>8}",
            row.sweep_value,
            e.scheme.name(),
            fmt_opt(e.pd.map(|r| r.point)),
            fmt_opt(e.pf.map(|r| r.point)),
            fmt_opt(e.qf.map(|r| r.point)),
            fmt_opt(e.qm.map(|r| r.point)),
            fmt_opt(e.qe.map(|r| r.point)),
        )
        .expect("writing to a String");
    }
    s
}
