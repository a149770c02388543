use crate::error::Result;
use crate::oracle::SmoothConvexOracle;
use crate::vector::{dist_sq, DecisionVector};

use super::ensemble::{EnsembleCore, MetaRate};
use super::{OnlineLearner, Problem, QueryMark, RoundOutcome, StepSizePool};

/// Overrides for [`SwordPlusPlus`]; `None` keeps the analysed default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SwordPlusPlusOptions {
    pub pool: Option<StepSizePool>,
    /// Correction coefficient `λ`, default `2L`.
    pub lambda: Option<f64>,
    /// Cap on the self-confident meta rate, default `1/(8D²L)`.
    pub rate_cap: Option<f64>,
    /// Replaces the self-confident schedule by a constant meta rate.
    pub fixed_rate: Option<f64>,
}

/// One-gradient meta-base ensemble with decision-deviation corrections.
///
/// Each round queries only `∇f_t(x_t)` at the combined decision and
/// broadcasts it to every base and to the meta layer. The meta rate is
/// `ε_t = min{1/(8D²L), √(ln N/(1 + D²Σ_{s=2}^{t−1}‖∇f_s(x_s) − ∇f_{s−1}(x_{s−1})‖²))}`.
#[derive(Debug, Clone)]
pub struct SwordPlusPlus {
    core: EnsembleCore,
    decision: DecisionVector,
    last_gradient: Option<Vec<f64>>,
    diagnostics: bool,
    t: usize,
}

impl SwordPlusPlus {
    pub fn new(problem: &Problem) -> Result<Self> {
        Self::with_options(problem, SwordPlusPlusOptions::default())
    }

    pub fn with_options(problem: &Problem, options: SwordPlusPlusOptions) -> Result<Self> {
        let l = problem.require_smooth("sword++")?;
        let d = problem.diameter();
        let pool = match options.pool {
            Some(p) => p,
            None => StepSizePool::swordpp(problem.gradient_bound, d, l, problem.horizon)?,
        };
        let rate = match options.fixed_rate {
            Some(e) => MetaRate::Fixed(e),
            None => MetaRate::SelfConfident {
                cap: Some(options.rate_cap.unwrap_or(1.0 / (8.0 * d * d * l))),
                scale: d * d,
            },
        };
        let lambda = options.lambda.unwrap_or(2.0 * l);
        let start = problem.domain.origin_projection();
        let core = EnsembleCore::new(problem.domain.clone(), pool.etas(), &start, lambda, rate)?;
        let decision = DecisionVector::from_raw(core.combined().to_vec());
        Ok(Self { core, decision, last_gradient: None, diagnostics: false, t: 0 })
    }

    pub fn weights(&self) -> &[f64] {
        self.core.weights()
    }

    pub fn pool_size(&self) -> usize {
        self.core.len()
    }
}

impl OnlineLearner for SwordPlusPlus {
    fn name(&self) -> &str {
        "swordpp"
    }

    fn decision(&self) -> &DecisionVector {
        &self.decision
    }

    fn round(&mut self, oracle: &SmoothConvexOracle) -> Result<RoundOutcome> {
        crate::error::check_dim(self.core.dim(), oracle.dim())?;
        self.t += 1;
        let mark = QueryMark::new(oracle);
        let mut diag = self.diagnostics.then(|| self.core.snapshot());
        let weights_entropy = Some(self.core.weights_entropy());
        let decision = self.decision.clone();
        let loss = oracle.value(&decision)?;
        let g = oracle.gradient(&decision)?.into_vec();
        let deviation = self.last_gradient.as_ref().map_or(0.0, |prev| dist_sq(&g, prev));
        self.core.step(&g, &g, deviation);
        self.last_gradient = Some(g);
        self.decision = DecisionVector::from_raw(self.core.combined().to_vec());
        if let Some(d) = diag.as_mut() {
            d.meta_losses = self.core.last_losses().to_vec();
        }
        let (gradient_queries, value_queries) = mark.since(oracle);
        Ok(RoundOutcome {
            t: self.t,
            decision,
            loss,
            gradient_queries,
            value_queries,
            weights_entropy,
            warning: None,
            diagnostics: diag,
        })
    }

    fn gradient_budget(&self, _t: usize) -> u64 {
        1
    }

    fn set_diagnostics(&mut self, enabled: bool) {
        self.diagnostics = enabled;
    }
}
