use crate::error::{check_dim, Result};
use crate::oracle::SmoothConvexOracle;
use crate::vector::{norm_sq, DecisionVector};

use super::ensemble::{EnsembleCore, MetaRate};
use super::{OnlineLearner, Problem, QueryMark, RoundOutcome, StepSizePool};

/// Ensemble baseline: OGD bases on the linear surrogate `⟨∇f_t(x_t), x⟩`
/// combined by vanilla Hedge with `ε_t = √(ln N/(1 + D²Σ_{s<t}‖∇f_s(x_s)‖²))`.
/// No optimism and no decision-deviation correction.
#[derive(Debug, Clone)]
pub struct Ader {
    core: EnsembleCore,
    decision: DecisionVector,
    zeros: Vec<f64>,
    diagnostics: bool,
    t: usize,
}

impl Ader {
    pub fn new(problem: &Problem) -> Result<Self> {
        let pool = StepSizePool::ader(problem.gradient_bound, problem.diameter(), problem.horizon)?;
        Self::with_pool(problem, pool)
    }

    pub fn with_pool(problem: &Problem, pool: StepSizePool) -> Result<Self> {
        let d = problem.diameter();
        let rate = MetaRate::SelfConfident { cap: None, scale: d * d };
        let start = problem.domain.origin_projection();
        let core = EnsembleCore::new(problem.domain.clone(), pool.etas(), &start, 0.0, rate)?;
        let decision = DecisionVector::from_raw(core.combined().to_vec());
        let zeros = vec![0.0; problem.domain.dim()];
        Ok(Self { core, decision, zeros, diagnostics: false, t: 0 })
    }

    pub fn weights(&self) -> &[f64] {
        self.core.weights()
    }
}

impl OnlineLearner for Ader {
    fn name(&self) -> &str {
        "ader"
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
        let decision = self.decision.clone();
        let loss = oracle.value(&decision)?;
        let g = oracle.gradient(&decision)?;
        self.core.step(&g, &self.zeros, norm_sq(&g));
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
