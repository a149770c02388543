//! Benchmark harness behind the `dynreg` binary.
//!
//! A TOML [`ExperimentConfig`] names an environment, a list of algorithms and
//! seeds. [`run`] plays every (algorithm, seed) pair and writes plot-ready CSV:
//!
//! - `run_<alg>_seed<k>.csv`: one row per round with cumulative loss, dynamic
//!   regret, cumulative query counts and meta-weight entropy.
//! - `aggregate_<alg>.csv`: per-round mean and sample standard deviation
//!   across seeds, accumulated in seed order.
//! - `summary.csv`: one row per run with the final loss, `F_T`, `P_T`, `S_T`,
//!   `V_T`, `V^f_T`, `V̄_T`, query totals, wall-clock seconds and config hash.
//! - `metadata.csv`: environment constants and generator details per seed.
//! - `certificates.csv` (with bound checking): each checked inequality with
//!   its realised slack.
//!
//! The first column of every file is the schema version. Files are written
//! only after all runs succeed, and removed again if any write fails.

mod certificates;
mod compare;
mod config;
mod output;
mod pools;
mod runner;

pub use certificates::{
    check_bounds, hedge_regret_and_bound, meta_regret_bound, oegd_regret_bound, oracle_meta_rate, Certificate,
};
pub use compare::{compare, load_summary, AlgorithmStats, Comparison, SummaryRecord, COMPARE_HEADER};
pub use config::{
    Algorithm, BanditOverride, CsvConfig, EmptyConfig, EnsembleOverride, EnvironmentConfig, ExperimentConfig, Overrides,
    PiecewiseConfig, StationaryConfig, StepOverride, SwordOverride, SwordPlusPlusOverride,
};
pub use output::{
    aggregate_file_name, mean_std, run_file_name, OutputSink, AGGREGATE_HEADER, CERTIFICATE_HEADER, RUN_HEADER,
    SCHEMA_VERSION, SUMMARY_HEADER,
};
pub use pools::{default_pools, format_pools};
pub use runner::{build_learner, run_experiment, run_learner, run_with_contexts, RoundRow, RunRecord, SeedContext};

use std::path::PathBuf;

use crate::error::Result;

/// Command-line adjustments applied on top of a config.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub check_bounds: bool,
    /// Replaces the configured seed list by this single seed.
    pub seed_override: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

/// Files written by [`run`] and the records behind them.
#[derive(Debug)]
pub struct RunOutput {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub records: Vec<RunRecord>,
    pub certificates: Vec<Certificate>,
}

/// Default output directory when neither the config nor the options name one.
pub const DEFAULT_OUT_DIR: &str = "results";

pub fn run(mut config: ExperimentConfig, options: &RunOptions) -> Result<RunOutput> {
    if let Some(seed) = options.seed_override {
        config.seeds = vec![seed];
    }
    if let Some(j) = options.jobs {
        config.jobs = Some(j);
    }
    let out_dir = options
        .out_dir
        .clone()
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    config.validate()?;
    let hash = config.hash();
    let (contexts, records) = run_with_contexts(&config)?;
    let certificates = if options.check_bounds { check_bounds(&contexts[0])? } else { Vec::new() };

    let mut sink = OutputSink::create(&out_dir)?;
    for r in &records {
        sink.write_csv(&run_file_name(&r.algorithm, r.seed), &RUN_HEADER, &output::run_rows(r))?;
    }
    for alg in config.parsed_algorithms()? {
        let label = alg.label();
        let runs: Vec<&RunRecord> = records.iter().filter(|r| r.algorithm == label).collect();
        sink.write_csv(&aggregate_file_name(&label), &AGGREGATE_HEADER, &output::aggregate_rows(&runs))?;
    }
    let exact: Vec<bool> = records
        .iter()
        .map(|r| contexts.iter().find(|c| c.seed == r.seed).is_some_and(|c| c.exact_variation))
        .collect();
    let summary: Vec<Vec<String>> =
        records.iter().zip(&exact).map(|(r, e)| output::summary_row(r, *e, &hash)).collect();
    sink.write_csv("summary.csv", &SUMMARY_HEADER, &summary)?;
    sink.write_csv("metadata.csv", &["schema_version", "seed", "key", "value"], &metadata_rows(&config, &hash, &contexts, &records))?;
    if options.check_bounds {
        sink.write_csv("certificates.csv", &CERTIFICATE_HEADER, &output::certificate_rows(&certificates))?;
    }
    let files = sink.commit();
    Ok(RunOutput { out_dir, files, records, certificates })
}

fn metadata_rows(
    config: &ExperimentConfig,
    hash: &str,
    contexts: &[SeedContext],
    records: &[RunRecord],
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    let mut push = |seed: &str, k: &str, v: String| {
        rows.push(vec![SCHEMA_VERSION.to_string(), seed.to_string(), k.to_string(), v]);
    };
    push("", "config_hash", hash.to_string());
    push("", "horizon", config.horizon.to_string());
    push("", "comparator", config.comparator.clone());
    push("", "summation", config.summation.clone());
    for ctx in contexts {
        let seed = ctx.seed.to_string();
        let c = ctx.env.constants();
        push(&seed, "environment", ctx.env.name().to_string());
        push(&seed, "dim", ctx.problem.domain.dim().to_string());
        push(&seed, "gradient_bound", c.gradient_bound.to_string());
        push(&seed, "smoothness", c.smoothness.to_string());
        push(&seed, "diameter", ctx.problem.diameter().to_string());
        push(&seed, "variation_method", if ctx.exact_variation { "analytic" } else { "grid" }.to_string());
        for (k, v) in ctx.env.metadata() {
            push(&seed, &k, v);
        }
    }
    for r in records {
        for w in &r.warnings {
            push(&r.seed.to_string(), &format!("warning.{}", r.algorithm), w.clone());
        }
    }
    rows
}
