use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

use super::certificates::Certificate;
use super::runner::RunRecord;

/// Version written as the first column of every output file.
pub const SCHEMA_VERSION: u32 = 1;

pub const RUN_HEADER: [&str; 9] = [
    "schema_version",
    "t",
    "algorithm",
    "seed",
    "cum_loss",
    "dyn_regret",
    "grad_queries",
    "value_queries",
    "weights_entropy",
];

pub const AGGREGATE_HEADER: [&str; 10] = [
    "schema_version",
    "t",
    "algorithm",
    "seeds",
    "cum_loss_mean",
    "cum_loss_std",
    "dyn_regret_mean",
    "dyn_regret_std",
    "grad_queries_mean",
    "value_queries_mean",
];

pub const SUMMARY_HEADER: [&str; 20] = [
    "schema_version",
    "algorithm",
    "seed",
    "environment",
    "horizon",
    "comparator",
    "final_loss",
    "dyn_regret",
    "small_loss",
    "path_length",
    "squared_path_length",
    "gradient_variation",
    "function_variation",
    "variation_exact",
    "empirical_variation",
    "grad_queries",
    "value_queries",
    "wall_clock_seconds",
    "pool_size",
    "config_hash",
];

pub const CERTIFICATE_HEADER: [&str; 8] =
    ["schema_version", "certificate", "algorithm", "parameter", "lhs", "rhs", "slack", "holds"];

/// Writes files into one directory and deletes all of them if any write fails
/// or the sink is dropped without [`OutputSink::commit`].
pub struct OutputSink {
    dir: PathBuf,
    written: Vec<PathBuf>,
    committed: bool,
}

impl OutputSink {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new(), committed: false })
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        self.written.push(path.clone());
        let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        w.write_record(header).map_err(|e| csv_error(&path, e))?;
        for row in rows {
            w.write_record(row).map_err(|e| csv_error(&path, e))?;
        }
        w.flush()?;
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn commit(mut self) -> Vec<PathBuf> {
        self.committed = true;
        std::mem::take(&mut self.written)
    }
}

impl Drop for OutputSink {
    fn drop(&mut self) {
        if !self.committed {
            for p in &self.written {
                let _ = fs::remove_file(p);
            }
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::Input { path: path.to_path_buf(), message: e.to_string() }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn run_file_name(algorithm: &str, seed: u64) -> String {
    format!("run_{algorithm}_seed{seed}.csv")
}

pub fn aggregate_file_name(algorithm: &str) -> String {
    format!("aggregate_{algorithm}.csv")
}

pub fn run_rows(record: &RunRecord) -> Vec<Vec<String>> {
    record
        .rows
        .iter()
        .map(|r| {
            vec![
                SCHEMA_VERSION.to_string(),
                r.t.to_string(),
                record.algorithm.clone(),
                record.seed.to_string(),
                r.cum_loss.to_string(),
                r.dyn_regret.to_string(),
                r.grad_queries.to_string(),
                r.value_queries.to_string(),
                opt(r.weights_entropy),
            ]
        })
        .collect()
}

/// Mean and sample standard deviation, summed in the given order; the
/// deviation of a single value is 0.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Per-round mean/std across the runs of one algorithm, in the given order.
pub fn aggregate_rows(runs: &[&RunRecord]) -> Vec<Vec<String>> {
    let Some(first) = runs.first() else { return Vec::new() };
    let seeds = runs.iter().map(|r| r.seed.to_string()).collect::<Vec<_>>().join(";");
    (0..first.rows.len())
        .map(|i| {
            let col = |f: &dyn Fn(&super::runner::RoundRow) -> f64| runs.iter().map(|r| f(&r.rows[i])).collect::<Vec<_>>();
            let (loss_m, loss_s) = mean_std(&col(&|r| r.cum_loss));
            let (reg_m, reg_s) = mean_std(&col(&|r| r.dyn_regret));
            let (gq, _) = mean_std(&col(&|r| r.grad_queries as f64));
            let (vq, _) = mean_std(&col(&|r| r.value_queries as f64));
            vec![
                SCHEMA_VERSION.to_string(),
                first.rows[i].t.to_string(),
                first.algorithm.clone(),
                seeds.clone(),
                loss_m.to_string(),
                loss_s.to_string(),
                reg_m.to_string(),
                reg_s.to_string(),
                gq.to_string(),
                vq.to_string(),
            ]
        })
        .collect()
}

pub fn summary_row(record: &RunRecord, exact_variation: bool, config_hash: &str) -> Vec<String> {
    let r = &record.report;
    vec![
        SCHEMA_VERSION.to_string(),
        record.algorithm.clone(),
        record.seed.to_string(),
        record.environment.clone(),
        r.horizon().to_string(),
        record.comparator.as_str().to_string(),
        r.final_loss().to_string(),
        r.final_regret().to_string(),
        r.small_loss().to_string(),
        r.path_length.to_string(),
        r.squared_path_length.to_string(),
        opt(r.gradient_variation),
        opt(r.function_variation),
        exact_variation.to_string(),
        r.empirical_variation.to_string(),
        r.gradient_queries.to_string(),
        r.value_queries.to_string(),
        r.wall_clock_seconds.to_string(),
        record.pool_size.to_string(),
        config_hash.to_string(),
    ]
}

pub fn certificate_rows(certs: &[Certificate]) -> Vec<Vec<String>> {
    certs
        .iter()
        .map(|c| {
            vec![
                SCHEMA_VERSION.to_string(),
                c.name.clone(),
                c.algorithm.clone(),
                c.parameter.clone(),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.slack().to_string(),
                c.holds().to_string(),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_oracle() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sink_removes_files_unless_committed() {
        let dir = tempfile::tempdir().unwrap();
        let path = {
            let mut sink = OutputSink::create(dir.path()).unwrap();
            sink.write_csv("a.csv", &["x"], &[vec!["1".into()]]).unwrap()
        };
        assert!(!path.exists());
        let mut sink = OutputSink::create(dir.path()).unwrap();
        let path = sink.write_csv("a.csv", &["x"], &[vec!["1".into()]]).unwrap();
        sink.commit();
        assert_eq!(fs::read_to_string(path).unwrap(), "x\n1\n");
    }
}
