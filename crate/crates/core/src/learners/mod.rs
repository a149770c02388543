//! Full-information learners behind one round interface.
//!
//! A learner holds its upcoming decision `x_t`. [`OnlineLearner::round`] plays
//! it against the revealed oracle, queries what the algorithm needs, and
//! prepares `x_{t+1}`. Query counts are measured on the oracle's counter, so
//! the reported budget is what actually happened.

mod ader;
mod ensemble;
mod oegd;
mod ogd;
mod pool;
mod sword;
mod swordpp;

pub use ader::Ader;
pub use ensemble::MetaRate;
pub(crate) use ensemble::EnsembleCore;
pub use oegd::Oegd;
pub use ogd::Ogd;
pub use pool::StepSizePool;
pub(crate) use pool::{check_constants as pool_constants, grid_size as pool_grid_size};
pub use sword::{GradientPoint, Sword, SwordOptions};
pub use swordpp::{SwordPlusPlus, SwordPlusPlusOptions};

use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::oracle::SmoothConvexOracle;
use crate::vector::DecisionVector;

/// Known problem constants every learner is tuned with.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub domain: FeasibleDomain,
    /// `G`, a bound on gradient norms over the domain.
    pub gradient_bound: f64,
    /// `L`, the common smoothness constant.
    pub smoothness: f64,
    /// `T`.
    pub horizon: usize,
}

impl Problem {
    pub fn new(domain: FeasibleDomain, gradient_bound: f64, smoothness: f64, horizon: usize) -> Result<Self> {
        if !(gradient_bound.is_finite() && gradient_bound > 0.0) {
            return Err(Error::InvalidParameter(format!("G must be positive, got {gradient_bound}")));
        }
        if !(smoothness.is_finite() && smoothness >= 0.0) {
            return Err(Error::InvalidParameter(format!("L must be nonnegative, got {smoothness}")));
        }
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be >= 1".into()));
        }
        Ok(Self { domain, gradient_bound, smoothness, horizon })
    }

    pub fn diameter(&self) -> f64 {
        self.domain.diameter()
    }

    pub(crate) fn require_smooth(&self, who: &str) -> Result<f64> {
        if self.smoothness > 0.0 {
            Ok(self.smoothness)
        } else {
            Err(Error::InvalidParameter(format!("{who} needs a positive smoothness constant L")))
        }
    }
}

/// Per-round internals of an ensemble, recorded when diagnostics are enabled.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundDiagnostics {
    /// `p_t`, the weights that produced the decision.
    pub weights: Vec<f64>,
    /// `x_{t,i}`.
    pub base_decisions: Vec<DecisionVector>,
    /// `m_t`, the meta optimism behind `p_t`.
    pub meta_optimism: Vec<f64>,
    /// `ℓ_t`, the meta feedback observed this round.
    pub meta_losses: Vec<f64>,
    /// `ε_t`, the meta rate behind `p_t`.
    pub meta_rate: f64,
    pub bandit: Option<BanditDiagnostics>,
}

/// Two-point feedback details of one bandit round.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditDiagnostics {
    /// Sampled coordinate `i_t`, zero-based.
    pub coordinate: usize,
    pub committed: [DecisionVector; 2],
    pub finite_difference: f64,
    /// `g̃_t`.
    pub estimator: DecisionVector,
    /// `M_t` used to build the estimator.
    pub optimism: DecisionVector,
    /// `M^var_t`.
    pub variation_optimism: DecisionVector,
    /// Weight on the variation optimism (best mode), else `None`.
    pub gamma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub t: usize,
    pub decision: DecisionVector,
    pub loss: f64,
    pub gradient_queries: u64,
    pub value_queries: u64,
    /// Entropy of the meta weights behind the decision (ensembles only).
    pub weights_entropy: Option<f64>,
    pub warning: Option<String>,
    pub diagnostics: Option<RoundDiagnostics>,
}

pub trait OnlineLearner {
    fn name(&self) -> &str;

    /// The decision the next round will play.
    fn decision(&self) -> &DecisionVector;

    fn round(&mut self, oracle: &SmoothConvexOracle) -> Result<RoundOutcome>;

    /// Gradient queries the algorithm makes in round `t`.
    fn gradient_budget(&self, t: usize) -> u64;

    /// Value queries the algorithm makes in round `t`.
    fn value_budget(&self, _t: usize) -> u64 {
        1
    }

    fn set_diagnostics(&mut self, _enabled: bool) {}
}

/// Counter snapshot used to report per-round query deltas.
pub(crate) struct QueryMark {
    values: u64,
    gradients: u64,
}

impl QueryMark {
    pub(crate) fn new(oracle: &SmoothConvexOracle) -> Self {
        Self { values: oracle.value_queries(), gradients: oracle.gradient_queries() }
    }

    /// `(gradient, value)` queries since the mark.
    pub(crate) fn since(&self, oracle: &SmoothConvexOracle) -> (u64, u64) {
        (oracle.gradient_queries() - self.gradients, oracle.value_queries() - self.values)
    }
}

pub(crate) fn check_oracle_dim(domain: &FeasibleDomain, oracle: &SmoothConvexOracle) -> Result<()> {
    crate::error::check_dim(domain.dim(), oracle.dim())
}
