use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::oracle::SmoothConvexOracle;
use crate::vector::{step_into, DecisionVector};

use super::{check_oracle_dim, OnlineLearner, Problem, QueryMark, RoundOutcome};

/// Projected online gradient descent with a fixed step, `x_{t+1} = Π[x_t − η∇f_t(x_t)]`.
#[derive(Debug, Clone)]
pub struct Ogd {
    domain: FeasibleDomain,
    eta: f64,
    x: DecisionVector,
    t: usize,
}

impl Ogd {
    /// Default step `η = D/(G√T)`, started at the projection of the origin.
    pub fn new(problem: &Problem) -> Result<Self> {
        let eta = problem.diameter() / (problem.gradient_bound * (problem.horizon as f64).sqrt());
        Self::with_step(problem, eta)
    }

    pub fn with_step(problem: &Problem, eta: f64) -> Result<Self> {
        let start = problem.domain.origin_projection();
        Self::with_start(problem.domain.clone(), eta, start)
    }

    pub fn with_start(domain: FeasibleDomain, eta: f64, start: DecisionVector) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::InvalidParameter(format!("OGD step must be positive, got {eta}")));
        }
        let x = domain.project(&start)?;
        Ok(Self { domain, eta, x, t: 0 })
    }

    pub fn step_size(&self) -> f64 {
        self.eta
    }
}

impl OnlineLearner for Ogd {
    fn name(&self) -> &str {
        "ogd"
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
        let mut next = vec![0.0; decision.dim()];
        step_into(&mut next, &decision, self.eta, &g);
        self.domain.project_in_place(&mut next);
        self.x = DecisionVector::from_raw(next);
        let (gradient_queries, value_queries) = mark.since(oracle);
        Ok(RoundOutcome {
            t: self.t,
            decision,
            loss,
            gradient_queries,
            value_queries,
            weights_entropy: None,
            warning: None,
            diagnostics: None,
        })
    }

    fn gradient_budget(&self, _t: usize) -> u64 {
        1
    }
}
