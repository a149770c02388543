//! Deterministic loss streams with declared constants.
//!
//! Every environment materialises its whole stream at construction, so
//! `next_round(t)` is a lookup and the same seed always yields the same
//! functions. Seeded environments draw from stream 0 of a ChaCha8 generator
//! keyed by the run seed.

mod quadratic;
mod regression;

pub use quadratic::{QuadraticInstance, StationaryQuadratic};
pub use regression::{CsvRegression, CsvRegressionSpec, PiecewiseRegression, PiecewiseRegressionSpec};

use rand::Rng;
use rand_distr::StandardNormal;

use crate::domain::FeasibleDomain;
use crate::error::{check_dim, Error, Result};
use crate::learners::Problem;
use crate::metrics::{comparator_minimizers, fixed_best, ComparatorKind, ComparatorSequence};
use crate::oracle::{OracleConstants, SharedObjective, SmoothConvexOracle};
use crate::vector::DecisionVector;

pub trait Environment: Send + Sync {
    fn name(&self) -> &str;

    fn domain(&self) -> &FeasibleDomain;

    fn constants(&self) -> OracleConstants;

    /// `f_1, …, f_T`.
    fn functions(&self) -> &[SharedObjective];

    /// Generating model per round, when the stream has one.
    fn true_model(&self) -> Option<&[DecisionVector]> {
        None
    }

    /// Descriptive key/value pairs recorded with every run.
    fn metadata(&self) -> Vec<(String, String)> {
        Vec::new()
    }

    fn horizon(&self) -> usize {
        self.functions().len()
    }

    /// Oracle for round `t` (one-based) with a fresh counter.
    fn next_round(&self, t: usize) -> Result<SmoothConvexOracle> {
        let horizon = self.horizon();
        if t == 0 || t > horizon {
            return Err(Error::RoundOutOfRange { t, horizon });
        }
        Ok(SmoothConvexOracle::new(self.functions()[t - 1].clone(), self.constants()))
    }

    fn problem(&self) -> Result<Problem> {
        let c = self.constants();
        Problem::new(self.domain().clone(), c.gradient_bound, c.smoothness, self.horizon())
    }

    fn comparators(&self, kind: ComparatorKind) -> Result<ComparatorSequence> {
        match kind {
            ComparatorKind::Minimizers => comparator_minimizers(self.functions(), self.domain()),
            ComparatorKind::FixedBest => fixed_best(self.functions(), self.domain()),
            ComparatorKind::TrueModel => match self.true_model() {
                Some(points) => ComparatorSequence::new(points.to_vec(), kind, self.domain()),
                None => Err(Error::Unsupported(format!("environment `{}` has no true model", self.name()))),
            },
            ComparatorKind::UserSupplied => {
                Err(Error::Unsupported("user-supplied comparators must be loaded from a file".into()))
            }
        }
    }
}

/// An explicit list of functions; used by tests and foreign callers.
#[derive(Debug, Clone)]
pub struct SequenceEnv {
    name: String,
    domain: FeasibleDomain,
    constants: OracleConstants,
    functions: Vec<SharedObjective>,
    true_model: Option<Vec<DecisionVector>>,
}

impl SequenceEnv {
    pub fn new(
        name: impl Into<String>,
        domain: FeasibleDomain,
        constants: OracleConstants,
        functions: Vec<SharedObjective>,
    ) -> Result<Self> {
        if functions.is_empty() {
            return Err(Error::InvalidParameter("environment has no rounds".into()));
        }
        functions.iter().try_for_each(|f| check_dim(domain.dim(), f.dim()))?;
        Ok(Self { name: name.into(), domain, constants, functions, true_model: None })
    }

    pub fn with_true_model(mut self, model: Vec<DecisionVector>) -> Result<Self> {
        check_dim(self.functions.len(), model.len())?;
        self.true_model = Some(model);
        Ok(self)
    }
}

impl Environment for SequenceEnv {
    fn name(&self) -> &str {
        &self.name
    }

    fn domain(&self) -> &FeasibleDomain {
        &self.domain
    }

    fn constants(&self) -> OracleConstants {
        self.constants
    }

    fn functions(&self) -> &[SharedObjective] {
        &self.functions
    }

    fn true_model(&self) -> Option<&[DecisionVector]> {
        self.true_model.as_deref()
    }
}

/// Uniform draw from the centred ball: Gaussian direction, radius `R·U^{1/d}`.
pub(crate) fn uniform_ball<R: Rng>(rng: &mut R, dim: usize, radius: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = crate::vector::norm(&dir);
        if n > 0.0 {
            let r = radius * rng.gen::<f64>().powf(1.0 / dim as f64);
            return dir.into_iter().map(|v| v * r / n).collect();
        }
    }
}
