use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use crate::bandit::{BanditOptions, SwordBandit};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::learners::{
    Ader, Oegd, Ogd, OnlineLearner, Problem, StepSizePool, Sword, SwordOptions, SwordPlusPlus, SwordPlusPlusOptions,
};
use crate::metrics::{
    empirical_variation, function_variation, gradient_variation, ComparatorKind, ComparatorSequence, RegretReport,
    Summation, VariationMethod,
};
use crate::oracle::QueryCounter;
use crate::vector::DecisionVector;

use super::config::{parse_gradient_point, Algorithm, ExperimentConfig, Overrides};

/// One row of a per-run curve; query counts are cumulative.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundRow {
    pub t: usize,
    pub cum_loss: f64,
    pub dyn_regret: f64,
    pub grad_queries: u64,
    pub value_queries: u64,
    pub weights_entropy: Option<f64>,
}

/// Outcome of one (algorithm, seed) run.
#[derive(Debug, Clone)]
pub struct RunRecord {
    pub algorithm: String,
    pub seed: u64,
    pub environment: String,
    pub comparator: ComparatorKind,
    pub pool_size: usize,
    pub rows: Vec<RoundRow>,
    pub report: RegretReport,
    pub warnings: Vec<String>,
}

/// Everything derived from the environment of one seed, shared by all
/// algorithms run on it.
pub struct SeedContext {
    pub seed: u64,
    pub env: Box<dyn Environment>,
    pub problem: Problem,
    pub comparators: ComparatorSequence,
    pub comparator_losses: Vec<f64>,
    pub gradient_variation: Option<f64>,
    pub function_variation: Option<f64>,
    /// Whether the variations are exact rather than grid lower bounds.
    pub exact_variation: bool,
}

impl SeedContext {
    pub fn build(config: &ExperimentConfig, seed: u64) -> Result<Self> {
        let env = config.build_environment(seed)?;
        let problem = env.problem()?;
        let kind = config.comparator_kind()?;
        let comparators = match kind {
            ComparatorKind::UserSupplied => {
                let path = config.comparator_file.as_deref().expect("validated");
                load_comparators(path, env.as_ref())?
            }
            _ => env.comparators(kind)?,
        };
        if comparators.len() != env.horizon() {
            return Err(Error::Config(format!(
                "comparator sequence has {} points for horizon {}",
                comparators.len(),
                env.horizon()
            )));
        }
        let comparator_losses =
            env.functions().iter().zip(comparators.points()).map(|(f, u)| f.value(u)).collect();
        let (gradient_variation, function_variation, exact_variation) =
            variations(env.as_ref(), config.variation_samples)?;
        Ok(Self {
            seed,
            env,
            problem,
            comparators,
            comparator_losses,
            gradient_variation,
            function_variation,
            exact_variation,
        })
    }
}

/// Analytic variations when the losses admit them, else grid lower bounds.
fn variations(env: &dyn Environment, samples: usize) -> Result<(Option<f64>, Option<f64>, bool)> {
    let (f, dom) = (env.functions(), env.domain());
    match gradient_variation(f, dom, VariationMethod::AnalyticQuadratic) {
        Ok(v) => Ok((Some(v), Some(function_variation(f, dom, VariationMethod::AnalyticQuadratic)?), true)),
        Err(Error::Unsupported(_)) if samples == 0 => Ok((None, None, false)),
        Err(Error::Unsupported(_)) => {
            let method = VariationMethod::Grid { samples };
            Ok((Some(gradient_variation(f, dom, method)?), Some(function_variation(f, dom, method)?), false))
        }
        Err(e) => Err(e),
    }
}

/// Comparator points from a header-less CSV, one row per round.
fn load_comparators(path: &Path, env: &dyn Environment) -> Result<ComparatorSequence> {
    let input = |message: String| Error::Input { path: path.to_path_buf(), message };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| input(e.to_string()))?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| input(format!("row {}: {e}", row + 1)))?;
        let values = record
            .iter()
            .enumerate()
            .map(|(col, s)| {
                s.parse::<f64>().map_err(|e| input(format!("row {}, column {}: {e}", row + 1, col + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != env.domain().dim() {
            return Err(input(format!(
                "row {}: expected {} values, got {}",
                row + 1,
                env.domain().dim(),
                values.len()
            )));
        }
        points.push(DecisionVector::new(values).map_err(|e| input(format!("row {}: {e}", row + 1)))?);
    }
    ComparatorSequence::new(points, ComparatorKind::UserSupplied, env.domain())
        .map_err(|e| input(e.to_string()))
}

fn explicit_pool(etas: &Option<Vec<f64>>) -> Result<Option<StepSizePool>> {
    etas.as_ref()
        .map(|e| {
            let cap = e.iter().copied().fold(0.0, f64::max);
            StepSizePool::new(e.clone(), cap)
        })
        .transpose()
}

/// Learner for `algorithm` with config overrides applied, plus its pool size.
pub fn build_learner(
    algorithm: Algorithm,
    problem: &Problem,
    overrides: &Overrides,
    seed: u64,
) -> Result<(Box<dyn OnlineLearner>, usize)> {
    Ok(match algorithm {
        Algorithm::Ogd => {
            let learner = match overrides.ogd.as_ref().and_then(|o| o.eta) {
                Some(eta) => Ogd::with_step(problem, eta)?,
                None => Ogd::new(problem)?,
            };
            (Box::new(learner), 1)
        }
        Algorithm::Oegd => {
            let d = problem.diameter();
            let default = (d / (problem.gradient_bound * (problem.horizon as f64).sqrt()))
                .min(1.0 / (4.0 * problem.smoothness.max(f64::MIN_POSITIVE)));
            let eta = overrides.oegd.as_ref().and_then(|o| o.eta).unwrap_or(default);
            (Box::new(Oegd::new(problem, eta)?), 1)
        }
        Algorithm::Ader => {
            let learner = match explicit_pool(&overrides.ader.as_ref().and_then(|o| o.etas.clone()))? {
                Some(pool) => Ader::with_pool(problem, pool)?,
                None => Ader::new(problem)?,
            };
            let n = learner.weights().len();
            (Box::new(learner), n)
        }
        Algorithm::Sword => {
            let o = overrides.sword.clone().unwrap_or_default();
            let options = SwordOptions {
                pool: explicit_pool(&o.etas)?,
                gradient_point: o.gradient_point.as_deref().map(parse_gradient_point).transpose()?.unwrap_or_default(),
                rate_cap: o.rate_cap,
                fixed_rate: o.fixed_rate,
            };
            let learner = Sword::with_options(problem, options)?;
            let n = learner.pool_size();
            (Box::new(learner), n)
        }
        Algorithm::SwordPlusPlus => {
            let o = overrides.swordpp.clone().unwrap_or_default();
            let options = SwordPlusPlusOptions {
                pool: explicit_pool(&o.etas)?,
                lambda: o.lambda,
                rate_cap: o.rate_cap,
                fixed_rate: o.fixed_rate,
            };
            let learner = SwordPlusPlus::with_options(problem, options)?;
            let n = learner.pool_size();
            (Box::new(learner), n)
        }
        Algorithm::SwordBandit(mode) => {
            let o = overrides.sword_bandit.clone().unwrap_or_default();
            let options = BanditOptions {
                mode,
                delta: o.delta,
                lambda: o.lambda,
                rate_cap: o.rate_cap,
                fixed_rate: o.fixed_rate,
                pool: explicit_pool(&o.etas)?,
            };
            let learner = SwordBandit::new(problem, options, seed)?;
            let n = learner.pool_size();
            (Box::new(learner), n)
        }
    })
}

/// Plays `learner` through the whole stream of `ctx`.
pub fn run_learner(
    algorithm: &str,
    mut learner: Box<dyn OnlineLearner>,
    pool_size: usize,
    ctx: &SeedContext,
    summation: Summation,
) -> Result<RunRecord> {
    let env = ctx.env.as_ref();
    let horizon = env.horizon();
    let counter = QueryCounter::new();
    let mut losses = Vec::with_capacity(horizon);
    let mut decisions = Vec::with_capacity(horizon);
    let mut queries = Vec::with_capacity(horizon);
    let mut entropies = Vec::with_capacity(horizon);
    let mut warnings = Vec::new();
    let oracles = (1..=horizon).map(|t| env.next_round(t)).collect::<Result<Vec<_>>>()?;

    let start = Instant::now();
    for oracle in oracles {
        let oracle = oracle.with_counter(&counter);
        let out = learner.round(&oracle)?;
        losses.push(out.loss);
        decisions.push(out.decision);
        queries.push((counter.gradient_queries(), counter.value_queries()));
        entropies.push(out.weights_entropy);
        if let Some(w) = out.warning {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    let wall_clock_seconds = start.elapsed().as_secs_f64();

    let mut report = RegretReport::from_losses(&losses, &ctx.comparator_losses, summation)?;
    report.path_length = ctx.comparators.path_length();
    report.squared_path_length = crate::metrics::squared_path_length(ctx.comparators.points())?;
    report.gradient_variation = ctx.gradient_variation;
    report.function_variation = ctx.function_variation;
    report.empirical_variation = empirical_variation(env.functions(), &decisions)?;
    report.gradient_queries = counter.gradient_queries();
    report.value_queries = counter.value_queries();
    report.wall_clock_seconds = wall_clock_seconds;

    let rows = (0..horizon)
        .map(|i| RoundRow {
            t: i + 1,
            cum_loss: report.cumulative_loss[i],
            dyn_regret: report.regret_at(i + 1),
            grad_queries: queries[i].0,
            value_queries: queries[i].1,
            weights_entropy: entropies[i],
        })
        .collect();
    Ok(RunRecord {
        algorithm: algorithm.to_string(),
        seed: ctx.seed,
        environment: env.name().to_string(),
        comparator: ctx.comparators.kind(),
        pool_size,
        rows,
        report,
        warnings,
    })
}

/// Runs every configured (algorithm, seed) pair, ordered by algorithm then
/// seed as listed in the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>> {
    Ok(run_with_contexts(config)?.1)
}

/// As [`run_experiment`], also returning the per-seed contexts in seed order.
pub fn run_with_contexts(config: &ExperimentConfig) -> Result<(Vec<SeedContext>, Vec<RunRecord>)> {
    config.validate()?;
    let algorithms = config.parsed_algorithms()?;
    let summation = config.summation_mode()?;
    let jobs = config.jobs.unwrap_or(1).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    pool.install(|| {
        let contexts =
            config.seeds.par_iter().map(|s| SeedContext::build(config, *s)).collect::<Result<Vec<_>>>()?;
        let pairs: Vec<(Algorithm, usize)> =
            algorithms.iter().flat_map(|a| (0..contexts.len()).map(move |i| (*a, i))).collect();
        let records = pairs
            .par_iter()
            .map(|(alg, i)| {
                let ctx = &contexts[*i];
                let (learner, n) = build_learner(*alg, &ctx.problem, &config.overrides, ctx.seed)?;
                run_learner(&alg.label(), learner, n, ctx, summation)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((contexts, records))
    })
}
