use crate::domain::FeasibleDomain;
use crate::error::Result;
use crate::omd::{OmdState, Regularizer};
use crate::oracle::SmoothConvexOracle;
use crate::vector::DecisionVector;

use super::{check_oracle_dim, OnlineLearner, Problem, QueryMark, RoundOutcome};

/// Optimistic online gradient descent with the previous gradient as optimism:
/// `x_t = Π[x̂_t − η∇f_{t−1}(x_{t−1})]`, `x̂_{t+1} = Π[x̂_t − η∇f_t(x_t)]`.
#[derive(Debug, Clone)]
pub struct Oegd {
    domain: FeasibleDomain,
    state: OmdState,
    x: DecisionVector,
    warning: Option<String>,
    t: usize,
}

impl Oegd {
    pub fn new(problem: &Problem, eta: f64) -> Result<Self> {
        Self::with_start(problem, eta, problem.domain.origin_projection())
    }

    pub fn with_start(problem: &Problem, eta: f64, start: DecisionVector) -> Result<Self> {
        let x_hat = problem.domain.project(&start)?;
        let state = OmdState::new(x_hat.clone(), eta)?;
        let limit = 1.0 / (4.0 * problem.smoothness);
        let warning = (eta > limit).then(|| format!("step {eta} exceeds 1/(4L) = {limit}; bound not certified"));
        Ok(Self { domain: problem.domain.clone(), state, x: x_hat, warning, t: 0 })
    }

    pub fn step_size(&self) -> f64 {
        self.state.step_size()
    }

    pub fn auxiliary(&self) -> &DecisionVector {
        self.state.x_hat()
    }

    pub fn warning(&self) -> Option<&str> {
        self.warning.as_deref()
    }
}

impl OnlineLearner for Oegd {
    fn name(&self) -> &str {
        "oegd"
    }

    fn decision(&self) -> &DecisionVector {
        &self.x
    }

    fn round(&mut self, oracle: &SmoothConvexOracle) -> Result<RoundOutcome> {
        check_oracle_dim(&self.domain, oracle)?;
        self.t += 1;
        let mark = QueryMark::new(oracle);
        let decision = self.x.clone();
        let loss = oracle.value(&decision)?;
        let g = oracle.gradient(&decision)?;
        self.state.update(&g, &self.domain, Regularizer::Euclidean)?;
        self.x = self.state.decide(&g, &self.domain, Regularizer::Euclidean)?;
        let (gradient_queries, value_queries) = mark.since(oracle);
        Ok(RoundOutcome {
            t: self.t,
            decision,
            loss,
            gradient_queries,
            value_queries,
            weights_entropy: None,
            warning: self.warning.clone(),
            diagnostics: None,
        })
    }

    fn gradient_budget(&self, _t: usize) -> u64 {
        1
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::oracle::{OracleConstants, SeparableQuadratic};

    fn setup(eta: f64) -> (Oegd, SmoothConvexOracle) {
        let problem = Problem::new(FeasibleDomain::interval(-1.0, 1.0).unwrap(), 1.0, 1.0, 10).unwrap();
        let start = DecisionVector::new(vec![1.0]).unwrap();
        let oegd = Oegd::with_start(&problem, eta, start).unwrap();
        let f = Arc::new(SeparableQuadratic::scalar(1.0, 0.0).unwrap());
        let o = SmoothConvexOracle::new(f, OracleConstants { gradient_bound: 1.0, smoothness: 1.0, nonnegative: true });
        (oegd, o)
    }

    #[test]
    fn first_round_plays_auxiliary_iterate() {
        let (oegd, _) = setup(0.25);
        assert_eq!(oegd.decision(), oegd.auxiliary());
    }

    #[test]
    fn two_closed_form_steps() {
        let (mut oegd, o) = setup(0.25);
        let out = oegd.round(&o).unwrap();
        assert_eq!(out.decision[0], 1.0);
        assert_eq!(oegd.auxiliary()[0], 0.75);
        assert_eq!(oegd.decision()[0], 0.5);
        assert!(out.warning.is_none());
    }

    #[test]
    fn oversized_step_is_flagged_but_runs() {
        let (mut oegd, o) = setup(0.5);
        assert!(oegd.warning().is_some());
        assert!(oegd.round(&o).unwrap().warning.is_some());
    }
}
