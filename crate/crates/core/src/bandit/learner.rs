use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{FeasibleDomain, MEMBERSHIP_TOL};
use crate::error::{check_dim, Error, Result};
use crate::learners::{
    BanditDiagnostics, EnsembleCore, MetaRate, OnlineLearner, Problem, QueryMark, RoundOutcome, StepSizePool,
};
use crate::oracle::SmoothConvexOracle;
use crate::vector::{dist_sq, DecisionVector};

use super::{bandit_pool, bco_constant, estimate_gradient, finite_difference, BanditOptimism, OptimismMode, TwoPointQuery};

/// Smallest default perturbation; below it the central difference is
/// dominated by cancellation.
pub const MIN_DELTA: f64 = 1e-8;

/// Stream of the run seed reserved for coordinate sampling.
const COORDINATE_STREAM: u64 = 1;

/// Overrides for [`SwordBandit`]; `None` keeps the analysed default.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditOptions {
    pub mode: OptimismMode,
    /// Perturbation `δ`, default `max(1/T, 1e−8)`.
    pub delta: Option<f64>,
    /// Correction coefficient, default `C·L` (variation, best) or `2L` (zero).
    pub lambda: Option<f64>,
    /// Meta rate cap, default `1/(4CD²L)` (variation, best); zero mode is uncapped.
    pub rate_cap: Option<f64>,
    pub fixed_rate: Option<f64>,
    pub pool: Option<StepSizePool>,
}

impl Default for BanditOptions {
    fn default() -> Self {
        Self { mode: OptimismMode::Variation, delta: None, lambda: None, rate_cap: None, fixed_rate: None, pool: None }
    }
}

impl BanditOptions {
    pub fn with_mode(mode: OptimismMode) -> Self {
        Self { mode, ..Self::default() }
    }
}

/// Two-point bandit version of the one-gradient ensemble.
///
/// The bases and the meta layer live on `(1 − α)X` with `α = δ/r`, where `r`
/// is the radius of the largest origin-centred ball inside `X`; this keeps
/// `y_t ± δe_i` in `X`. Each round makes two value queries and no gradient
/// queries. The reported loss is the mean of the two observed values.
#[derive(Debug, Clone)]
pub struct SwordBandit {
    domain: FeasibleDomain,
    core: EnsembleCore,
    optimism: BanditOptimism,
    delta: f64,
    alpha: f64,
    decision: DecisionVector,
    rng: ChaCha8Rng,
    coordinates: Vec<usize>,
    name: String,
    diagnostics: bool,
    t: usize,
}

impl SwordBandit {
    pub fn new(problem: &Problem, options: BanditOptions, seed: u64) -> Result<Self> {
        let l = problem.require_smooth("sword_bandit")?;
        let dim = problem.domain.dim();
        let d = problem.diameter();
        let horizon = problem.horizon;
        let delta = options.delta.unwrap_or((1.0 / horizon as f64).max(MIN_DELTA));
        if !(delta.is_finite() && delta > 0.0) {
            return Err(Error::InvalidParameter(format!("perturbation must be positive, got {delta}")));
        }
        let r = problem.domain.origin_inradius();
        if r <= 0.0 {
            return Err(Error::InvalidDomain("bandit shrinking needs a ball around the origin inside the domain".into()));
        }
        let alpha = delta / r;
        if alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "perturbation {delta} must be smaller than the origin inradius {r}"
            )));
        }
        let shrunk = FeasibleDomain::scaled(problem.domain.clone(), 1.0 - alpha)?;
        let pool = match options.pool {
            Some(p) => p,
            None => bandit_pool(options.mode, problem.gradient_bound, d, l, horizon, dim)?,
        };
        let c = bco_constant(dim, horizon as f64);
        let (default_lambda, default_cap) = match options.mode {
            OptimismMode::Zero => (2.0 * l, None),
            OptimismMode::Variation | OptimismMode::Best => (c * l, Some(1.0 / (4.0 * c * l * d * d))),
        };
        let rate = match options.fixed_rate {
            Some(e) => MetaRate::Fixed(e),
            None => MetaRate::SelfConfident { cap: options.rate_cap.or(default_cap), scale: d * d },
        };
        let start = shrunk.origin_projection();
        let core =
            EnsembleCore::new(shrunk, pool.etas(), &start, options.lambda.unwrap_or(default_lambda), rate)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(COORDINATE_STREAM);
        Ok(Self {
            domain: problem.domain.clone(),
            decision: DecisionVector::from_raw(core.combined().to_vec()),
            core,
            optimism: BanditOptimism::new(options.mode, dim, problem.gradient_bound)?,
            delta,
            alpha,
            rng,
            coordinates: Vec::with_capacity(horizon),
            name: format!("sword_bandit_{}", options.mode.as_str()),
            diagnostics: false,
            t: 0,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn mode(&self) -> OptimismMode {
        self.optimism.mode()
    }

    pub fn optimism(&self) -> &BanditOptimism {
        &self.optimism
    }

    pub fn weights(&self) -> &[f64] {
        self.core.weights()
    }

    pub fn pool_size(&self) -> usize {
        self.core.len()
    }

    /// Sampled coordinates `i_1, …, i_t` so far, zero-based.
    pub fn coordinates(&self) -> &[usize] {
        &self.coordinates
    }
}

impl OnlineLearner for SwordBandit {
    fn name(&self) -> &str {
        &self.name
    }

    fn decision(&self) -> &DecisionVector {
        &self.decision
    }

    fn round(&mut self, oracle: &SmoothConvexOracle) -> Result<RoundOutcome> {
        check_dim(self.core.dim(), oracle.dim())?;
        self.t += 1;
        let mark = QueryMark::new(oracle);
        let mut diag = self.diagnostics.then(|| self.core.snapshot());
        let weights_entropy = Some(self.core.weights_entropy());
        let coordinate = self.rng.gen_range(0..self.core.dim());
        self.coordinates.push(coordinate);
        let query = TwoPointQuery::new(self.decision.clone(), coordinate, self.delta)?;
        let committed = query.committed();
        for x in &committed {
            if !self.domain.contains(x, MEMBERSHIP_TOL) {
                return Err(Error::InvalidDomain(format!("committed point {:?} left the domain", x.as_slice())));
            }
        }
        let plus = oracle.value(&committed[0])?;
        let minus = oracle.value(&committed[1])?;
        let v = finite_difference(plus, minus, self.delta)?;
        let current = self.optimism.current().clone();
        let variation = self.optimism.variation().clone();
        let gamma = (self.optimism.mode() == OptimismMode::Best).then(|| self.optimism.gamma());
        let (estimator, _) = estimate_gradient(v, coordinate, &current)?;
        let deviation = dist_sq(&estimator, &current);
        let next = self.optimism.advance(&estimator, v, coordinate)?.clone();
        self.core.step(&estimator, &next, deviation);
        self.decision = DecisionVector::from_raw(self.core.combined().to_vec());

        if let Some(d) = diag.as_mut() {
            d.meta_losses = self.core.last_losses().to_vec();
            d.bandit = Some(BanditDiagnostics {
                coordinate,
                committed: committed.clone(),
                finite_difference: v,
                estimator,
                optimism: current,
                variation_optimism: variation,
                gamma,
            });
        }
        let (gradient_queries, value_queries) = mark.since(oracle);
        Ok(RoundOutcome {
            t: self.t,
            decision: query.base_point().clone(),
            loss: 0.5 * (plus + minus),
            gradient_queries,
            value_queries,
            weights_entropy,
            warning: None,
            diagnostics: diag,
        })
    }

    fn gradient_budget(&self, _t: usize) -> u64 {
        0
    }

    fn value_budget(&self, _t: usize) -> u64 {
        2
    }

    fn set_diagnostics(&mut self, enabled: bool) {
        self.diagnostics = enabled;
    }
}
