use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::montecarlo::MonteCarlo;

use super::config::{ExperimentConfig, ExperimentError};
use super::plot::emit_plot;

pub const CSV_HEADER: &str = "experiment,sweep,policy,mean,stderr,p95,n,seed";

/// One estimate for one policy at one sweep value.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub experiment: String,
    pub sweep: f64,
    pub policy: String,
    pub mean: f64,
    pub stderr: f64,
    pub p95: f64,
    pub n: usize,
    pub seed: u64,
}

/// Runs every sweep point; one row per (sweep value, policy) in config
/// order. Every sweep value reuses the same seed, so neighbouring points
/// share their random numbers.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, ExperimentError> {
    let resolved = cfg.resolve()?;
    let mut rows = Vec::with_capacity(resolved.points.len() * cfg.policies.len());
    for (value, spec) in &resolved.points {
        let mc = MonteCarlo::new(&resolved.a, &cfg.policies, spec, cfg.statistic)?;
        let estimates = mc.estimate(cfg.runs, cfg.workers)?;
        for (policy, est) in cfg.policies.iter().zip(estimates) {
            rows.push(ResultRow {
                experiment: cfg.name.clone(),
                sweep: *value,
                policy: policy.to_string(),
                mean: est.mean,
                stderr: est.std_error,
                p95: est.p95,
                n: est.n_runs,
                seed: cfg.master_seed,
            });
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[ResultRow]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_field(&r.experiment),
            r.sweep,
            csv_field(&r.policy),
            r.mean,
            r.stderr,
            r.p95,
            r.n,
            r.seed
        ));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Splits one CSV line, honouring double-quoted fields.
fn split_csv(line: &str) -> Vec<String> {
    let mut fields = vec![String::new()];
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                chars.next();
                fields.last_mut().unwrap().push('"');
            }
            ('"', _) => quoted = !quoted,
            (',', false) => fields.push(String::new()),
            _ => fields.last_mut().unwrap().push(c),
        }
    }
    fields
}

/// Parses [`rows_to_csv`] output.
pub fn read_csv(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err(ExperimentError::config("csv", format!("expected header `{CSV_HEADER}`")));
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            let f = split_csv(line);
            let bad = || ExperimentError::config(format!("csv line {}", i + 2), "malformed row");
            if f.len() != 8 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(ResultRow {
                experiment: f[0].clone(),
                sweep: num(&f[1])?,
                policy: f[2].clone(),
                mean: num(&f[3])?,
                stderr: num(&f[4])?,
                p95: num(&f[5])?,
                n: f[6].parse().map_err(|_| bad())?,
                seed: f[7].parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

/// Writes `<name>.csv`, `<name>.svg` and the resolved `<name>.toml` into
/// `dir`. Returns the paths written.
pub fn write_outputs(cfg: &ExperimentConfig, rows: &[ResultRow], dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::io(dir, e))?;
    let svg = emit_plot(rows)?;
    let files = [
        (format!("{}.csv", cfg.name), rows_to_csv(rows)),
        (format!("{}.svg", cfg.name), svg),
        (format!("{}.toml", cfg.name), cfg.to_toml()),
    ];
    let mut written = Vec::new();
    for (file, body) in files {
        let path = dir.join(file);
        std::fs::write(&path, body).map_err(|e| ExperimentError::io(&path, e))?;
        written.push(path);
    }
    Ok(written)
}
