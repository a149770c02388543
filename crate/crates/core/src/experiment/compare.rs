use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::output::{mean_std, SCHEMA_VERSION};

pub const COMPARE_HEADER: [&str; 13] = [
    "schema_version",
    "kind",
    "record",
    "algorithm",
    "seeds",
    "final_loss_mean",
    "final_loss_std",
    "dyn_regret_mean",
    "dyn_regret_std",
    "wall_clock_mean",
    "wall_clock_std",
    "grad_queries_mean",
    "value_queries_mean",
];

/// Mean and standard deviation across seeds of one algorithm in one record.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmStats {
    pub algorithm: String,
    pub seeds: usize,
    pub final_loss: (f64, f64),
    pub dyn_regret: (f64, f64),
    pub wall_clock: (f64, f64),
    pub grad_queries: f64,
    pub value_queries: f64,
}

/// One `summary.csv`, algorithms in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRecord {
    pub label: String,
    pub environment: String,
    pub horizon: usize,
    pub algorithms: Vec<AlgorithmStats>,
}

impl SummaryRecord {
    pub fn get(&self, algorithm: &str) -> Option<&AlgorithmStats> {
        self.algorithms.iter().find(|a| a.algorithm == algorithm)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub records: Vec<SummaryRecord>,
}

/// A summary file, or a directory holding `summary.csv`.
fn summary_path(path: &Path) -> PathBuf {
    if path.is_dir() {
        path.join("summary.csv")
    } else {
        path.to_path_buf()
    }
}

pub fn load_summary(path: &Path) -> Result<SummaryRecord> {
    let file = summary_path(path);
    let input = |message: String| Error::Input { path: file.clone(), message };
    let mut reader = csv::Reader::from_path(&file).map_err(|e| input(e.to_string()))?;
    let header = reader.headers().map_err(|e| input(e.to_string()))?.clone();
    let col = |name: &str| header.iter().position(|h| h == name).ok_or_else(|| input(format!("missing column `{name}`")));
    let idx = [
        col("algorithm")?,
        col("environment")?,
        col("horizon")?,
        col("final_loss")?,
        col("dyn_regret")?,
        col("wall_clock_seconds")?,
        col("grad_queries")?,
        col("value_queries")?,
    ];
    let mut order: Vec<String> = Vec::new();
    let mut columns: HashMap<String, [Vec<f64>; 5]> = HashMap::new();
    let mut meta: Option<(String, usize)> = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input(format!("row {}: {e}", row + 2)))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let num = |i: usize| {
            field(i).parse::<f64>().map_err(|e| input(format!("row {}, column `{}`: {e}", row + 2, &header[i])))
        };
        let env = field(idx[1]).to_string();
        let horizon: usize =
            field(idx[2]).parse().map_err(|e| input(format!("row {}, column `horizon`: {e}", row + 2)))?;
        match &meta {
            None => meta = Some((env, horizon)),
            Some((e, h)) if *e != env || *h != horizon => {
                return Err(input(format!("row {}: mixes environments or horizons", row + 2)));
            }
            Some(_) => {}
        }
        let alg = field(idx[0]).to_string();
        if !columns.contains_key(&alg) {
            order.push(alg.clone());
        }
        let entry = columns.entry(alg).or_default();
        for (k, i) in idx[3..].iter().enumerate() {
            entry[k].push(num(*i)?);
        }
    }
    let (environment, horizon) = meta.ok_or_else(|| input("no rows".into()))?;
    let algorithms = order
        .into_iter()
        .map(|alg| {
            let c = &columns[&alg];
            AlgorithmStats {
                seeds: c[0].len(),
                final_loss: mean_std(&c[0]),
                dyn_regret: mean_std(&c[1]),
                wall_clock: mean_std(&c[2]),
                grad_queries: mean_std(&c[3]).0,
                value_queries: mean_std(&c[4]).0,
                algorithm: alg,
            }
        })
        .collect();
    Ok(SummaryRecord { label: path.display().to_string(), environment, horizon, algorithms })
}

pub fn compare(paths: &[PathBuf]) -> Result<Comparison> {
    if paths.is_empty() {
        return Err(Error::InvalidParameter("compare needs at least one record".into()));
    }
    let records = paths.iter().map(|p| load_summary(p)).collect::<Result<Vec<_>>>()?;
    let first = &records[0];
    for r in &records[1..] {
        if r.horizon != first.horizon {
            return Err(Error::InvalidParameter(format!(
                "horizon mismatch: {} has T = {}, {} has T = {}",
                first.label, first.horizon, r.label, r.horizon
            )));
        }
        if r.environment != first.environment {
            return Err(Error::InvalidParameter(format!(
                "environment mismatch: {} uses `{}`, {} uses `{}`",
                first.label, first.environment, r.label, r.environment
            )));
        }
    }
    Ok(Comparison { records })
}

fn pm(x: (f64, f64)) -> String {
    format!("{:.6} ± {:.6}", x.0, x.1)
}

impl Comparison {
    /// Per-record means minus the first record's means, for algorithms both contain.
    pub fn differences(&self) -> Vec<(String, AlgorithmStats)> {
        let base = &self.records[0];
        let mut out = Vec::new();
        for r in &self.records[1..] {
            for a in &r.algorithms {
                if let Some(b) = base.get(&a.algorithm) {
                    out.push((
                        r.label.clone(),
                        AlgorithmStats {
                            algorithm: a.algorithm.clone(),
                            seeds: a.seeds,
                            final_loss: (a.final_loss.0 - b.final_loss.0, 0.0),
                            dyn_regret: (a.dyn_regret.0 - b.dyn_regret.0, 0.0),
                            wall_clock: (a.wall_clock.0 - b.wall_clock.0, 0.0),
                            grad_queries: a.grad_queries - b.grad_queries,
                            value_queries: a.value_queries - b.value_queries,
                        },
                    ));
                }
            }
        }
        out
    }

    pub fn csv_rows(&self) -> Vec<Vec<String>> {
        let row = |kind: &str, label: &str, a: &AlgorithmStats| {
            vec![
                SCHEMA_VERSION.to_string(),
                kind.to_string(),
                label.to_string(),
                a.algorithm.clone(),
                a.seeds.to_string(),
                a.final_loss.0.to_string(),
                a.final_loss.1.to_string(),
                a.dyn_regret.0.to_string(),
                a.dyn_regret.1.to_string(),
                a.wall_clock.0.to_string(),
                a.wall_clock.1.to_string(),
                a.grad_queries.to_string(),
                a.value_queries.to_string(),
            ]
        };
        let mut rows: Vec<Vec<String>> =
            self.records.iter().flat_map(|r| r.algorithms.iter().map(|a| row("stats", &r.label, a))).collect();
        rows.extend(self.differences().iter().map(|(label, a)| row("difference", label, a)));
        rows
    }

    pub fn to_text(&self) -> String {
        let first = &self.records[0];
        let mut s = format!("environment: {}, T = {}\n\n", first.environment, first.horizon);
        let _ = writeln!(
            s,
            "{:<28} {:<22} {:>5}  {:<32} {:<32} {:<28}",
            "record", "algorithm", "seeds", "final loss", "dynamic regret", "wall clock (s)"
        );
        for r in &self.records {
            for a in &r.algorithms {
                let _ = writeln!(
                    s,
                    "{:<28} {:<22} {:>5}  {:<32} {:<32} {:<28}",
                    r.label,
                    a.algorithm,
                    a.seeds,
                    pm(a.final_loss),
                    pm(a.dyn_regret),
                    pm(a.wall_clock)
                );
            }
        }
        let diffs = self.differences();
        if !diffs.is_empty() {
            let _ = writeln!(s, "\ndifference from {}:", first.label);
            for (label, a) in diffs {
                let _ = writeln!(
                    s,
                    "{:<28} {:<22} {:>5}  {:<32.6} {:<32.6} {:<28.6}",
                    label, a.algorithm, a.seeds, a.final_loss.0, a.dyn_regret.0, a.wall_clock.0
                );
            }
        }
        s
    }
}
