//! Per-round loss functions and the counted oracle learners query.
//!
//! An [`Objective`] is an immutable, shareable function with an analytic
//! gradient. A [`SmoothConvexOracle`] wraps one objective with the declared
//! environment constants and a [`QueryCounter`]; every learner-facing
//! evaluation goes through the oracle and increments exactly one counter.
//! Metrics evaluate the underlying objective directly and are never counted.

use std::cell::Cell;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use crate::domain::{DomainKind, FeasibleDomain};
use crate::error::{check_dim, check_finite, Error, Result};
use crate::vector::{dot, norm, DecisionVector};

pub trait Objective: fmt::Debug + Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    /// Smoothness constant of this single function.
    fn smoothness(&self) -> f64;

    fn as_separable_quadratic(&self) -> Option<&SeparableQuadratic> {
        None
    }

    fn as_squared_residual(&self) -> Option<&SquaredResidual> {
        None
    }

    /// Exact minimiser over `domain` when a closed form exists.
    fn minimizer(&self, _domain: &FeasibleDomain) -> Option<DecisionVector> {
        None
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        self.gradient_into(x, &mut g);
        g
    }
}

pub type SharedObjective = Arc<dyn Objective>;

/// `f(x) = Σ_j ½(a_j x_j − b_j)² + offset`. With `d = 1` this is the scalar
/// family `½(a x − b)²` of the quadratic instances.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableQuadratic {
    a: Vec<f64>,
    b: Vec<f64>,
    offset: f64,
}

impl SeparableQuadratic {
    pub fn new(a: Vec<f64>, b: Vec<f64>, offset: f64) -> Result<Self> {
        check_dim(a.len(), b.len())?;
        if a.is_empty() {
            return Err(Error::InvalidParameter("quadratic must have dimension >= 1".into()));
        }
        check_finite(&a, "quadratic coefficients")?;
        check_finite(&b, "quadratic coefficients")?;
        check_finite(&[offset], "quadratic offset")?;
        Ok(Self { a, b, offset })
    }

    pub fn scalar(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a], vec![b], 0.0)
    }

    /// `½‖x − c‖²`.
    pub fn centered(c: &[f64]) -> Result<Self> {
        Self::new(vec![1.0; c.len()], c.to_vec(), 0.0)
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }
}

impl Objective for SeparableQuadratic {
    fn dim(&self) -> usize {
        self.a.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut s = self.offset;
        for ((xi, ai), bi) in x.iter().zip(&self.a).zip(&self.b) {
            let r = ai * xi - bi;
            s += 0.5 * r * r;
        }
        s
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for (((o, xi), ai), bi) in out.iter_mut().zip(x).zip(&self.a).zip(&self.b) {
            *o = ai * (ai * xi - bi);
        }
    }

    fn smoothness(&self) -> f64 {
        self.a.iter().fold(0.0, |m, a| m.max(a * a))
    }

    fn as_separable_quadratic(&self) -> Option<&SeparableQuadratic> {
        Some(self)
    }

    fn minimizer(&self, domain: &FeasibleDomain) -> Option<DecisionVector> {
        if domain.dim() != self.dim() {
            return None;
        }
        match domain.kind() {
            DomainKind::Box { lower, upper } => {
                let u = self
                    .a
                    .iter()
                    .zip(&self.b)
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|((a, b), (l, h))| if *a == 0.0 { 0f64.clamp(*l, *h) } else { (b / a).clamp(*l, *h) })
                    .collect();
                Some(DecisionVector::from_raw(u))
            }
            DomainKind::Ball { .. } | DomainKind::Scaled { .. } => {
                // Isotropic curvature: the constrained minimiser is the projection
                // of the unconstrained one.
                let a0 = self.a[0];
                if a0 != 0.0 && self.a.iter().all(|a| a.abs() == a0.abs()) {
                    let c: Vec<f64> = self.b.iter().zip(&self.a).map(|(b, a)| b / a).collect();
                    domain.project(&c).ok()
                } else {
                    None
                }
            }
            DomainKind::Simplex { .. } => None,
        }
    }
}

/// Squared residual of a linear model, `f(w) = ½(y − ⟨x, w⟩)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredResidual {
    feature: Vec<f64>,
    target: f64,
}

impl SquaredResidual {
    pub fn new(feature: Vec<f64>, target: f64) -> Result<Self> {
        if feature.is_empty() {
            return Err(Error::InvalidParameter("feature vector is empty".into()));
        }
        check_finite(&feature, "regression feature")?;
        check_finite(&[target], "regression target")?;
        Ok(Self { feature, target })
    }

    pub fn feature(&self) -> &[f64] {
        &self.feature
    }

    pub fn target(&self) -> f64 {
        self.target
    }
}

impl Objective for SquaredResidual {
    fn dim(&self) -> usize {
        self.feature.len()
    }

    fn value(&self, w: &[f64]) -> f64 {
        let r = self.target - dot(&self.feature, w);
        0.5 * r * r
    }

    fn gradient_into(&self, w: &[f64], out: &mut [f64]) {
        let r = dot(&self.feature, w) - self.target;
        for (o, x) in out.iter_mut().zip(&self.feature) {
            *o = r * x;
        }
    }

    fn smoothness(&self) -> f64 {
        dot(&self.feature, &self.feature)
    }

    fn as_squared_residual(&self) -> Option<&SquaredResidual> {
        Some(self)
    }
}

/// `f(x) = ⟨c, x⟩ + offset`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    c: Vec<f64>,
    offset: f64,
}

impl Linear {
    pub fn new(c: Vec<f64>, offset: f64) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::InvalidParameter("linear loss has dimension 0".into()));
        }
        check_finite(&c, "linear coefficients")?;
        check_finite(&[offset], "linear offset")?;
        Ok(Self { c, offset })
    }
}

impl Objective for Linear {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        dot(&self.c, x) + self.offset
    }

    fn gradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.c);
    }

    fn smoothness(&self) -> f64 {
        0.0
    }

    fn minimizer(&self, domain: &FeasibleDomain) -> Option<DecisionVector> {
        if domain.dim() != self.dim() {
            return None;
        }
        match domain.kind() {
            DomainKind::Box { lower, upper } => Some(DecisionVector::from_raw(
                self.c
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .map(|(c, (l, h))| if *c > 0.0 { *l } else if *c < 0.0 { *h } else { 0f64.clamp(*l, *h) })
                    .collect(),
            )),
            DomainKind::Ball { center, radius } => {
                let n = norm(&self.c);
                if n == 0.0 {
                    return Some(domain.origin_projection());
                }
                Some(DecisionVector::from_raw(center.iter().zip(&self.c).map(|(x, c)| x - radius * c / n).collect()))
            }
            _ => None,
        }
    }
}

/// Constants an environment declares for every round of its stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConstants {
    /// Bound `G` on `‖∇f_t(x)‖₂` over the domain.
    pub gradient_bound: f64,
    /// Smoothness constant `L` shared by all rounds.
    pub smoothness: f64,
    /// Every `f_t` is nonnegative on the whole space.
    pub nonnegative: bool,
}

/// Value and gradient query counts for one run. Clones share the counts.
#[derive(Debug, Clone, Default)]
pub struct QueryCounter {
    values: Rc<Cell<u64>>,
    gradients: Rc<Cell<u64>>,
}

impl QueryCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value_queries(&self) -> u64 {
        self.values.get()
    }

    pub fn gradient_queries(&self) -> u64 {
        self.gradients.get()
    }

    /// Whether both handles count into the same totals.
    pub fn shares(&self, other: &QueryCounter) -> bool {
        Rc::ptr_eq(&self.gradients, &other.gradients)
    }
}

/// Counted access to one round's loss.
#[derive(Debug, Clone)]
pub struct SmoothConvexOracle {
    objective: SharedObjective,
    constants: OracleConstants,
    counter: QueryCounter,
}

impl SmoothConvexOracle {
    pub fn new(objective: SharedObjective, constants: OracleConstants) -> Self {
        Self { objective, constants, counter: QueryCounter::new() }
    }

    /// Rebinds the oracle to a run-wide counter.
    pub fn with_counter(mut self, counter: &QueryCounter) -> Self {
        self.counter = counter.clone();
        self
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        self.counter.values.set(self.counter.values.get() + 1);
        let v = self.objective.value(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite("oracle value"))
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Result<DecisionVector> {
        check_dim(self.dim(), x.len())?;
        self.counter.gradients.set(self.counter.gradients.get() + 1);
        let g = self.objective.gradient(x);
        check_finite(&g, "oracle gradient")?;
        Ok(DecisionVector::from_raw(g))
    }

    /// Uncounted access for metrics and certificates.
    pub fn objective(&self) -> &SharedObjective {
        &self.objective
    }

    pub fn constants(&self) -> OracleConstants {
        self.constants
    }

    pub fn lipschitz_grad_bound(&self) -> f64 {
        self.constants.gradient_bound
    }

    pub fn smoothness(&self) -> f64 {
        self.constants.smoothness
    }

    pub fn nonnegative(&self) -> bool {
        self.constants.nonnegative
    }

    pub fn counter(&self) -> &QueryCounter {
        &self.counter
    }

    pub fn value_queries(&self) -> u64 {
        self.counter.value_queries()
    }

    pub fn gradient_queries(&self) -> u64 {
        self.counter.gradient_queries()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constants() -> OracleConstants {
        OracleConstants { gradient_bound: 1.0, smoothness: 1.0, nonnegative: true }
    }

    #[test]
    fn counters_increment_once_per_call() {
        let f: SharedObjective = Arc::new(SeparableQuadratic::centered(&[0.0, 0.0]).unwrap());
        let oracle = SmoothConvexOracle::new(f, constants());
        oracle.value(&[1.0, 0.0]).unwrap();
        oracle.gradient(&[1.0, 0.0]).unwrap();
        oracle.gradient(&[0.0, 0.0]).unwrap();
        assert_eq!((oracle.value_queries(), oracle.gradient_queries()), (1, 2));
        oracle.objective().value(&[1.0, 1.0]);
        assert_eq!(oracle.value_queries(), 1);
    }

    #[test]
    fn shared_counter_accumulates_across_rounds() {
        let counter = QueryCounter::new();
        for c in [0.1, 0.2, 0.3] {
            let f: SharedObjective = Arc::new(SeparableQuadratic::scalar(1.0, c).unwrap());
            let o = SmoothConvexOracle::new(f, constants()).with_counter(&counter);
            o.gradient(&[0.0]).unwrap();
        }
        assert_eq!(counter.gradient_queries(), 3);
    }

    #[test]
    fn oracle_rejects_dimension_mismatch() {
        let f: SharedObjective = Arc::new(SeparableQuadratic::scalar(1.0, 0.0).unwrap());
        let oracle = SmoothConvexOracle::new(f, constants());
        assert!(oracle.gradient(&[0.0, 1.0]).is_err());
    }

    #[test]
    fn quadratic_minimizers_clip_to_box() {
        let d = FeasibleDomain::interval(-1.0, 1.0).unwrap();
        let f = SeparableQuadratic::scalar(0.1, 1.0).unwrap();
        assert_eq!(f.minimizer(&d).unwrap()[0], 1.0);
        let g = SeparableQuadratic::scalar(2.0, 1.0).unwrap();
        assert_eq!(g.minimizer(&d).unwrap()[0], 0.5);
        let z = SeparableQuadratic::scalar(0.0, 1.0).unwrap();
        assert_eq!(z.minimizer(&d).unwrap()[0], 0.0);
    }

    #[test]
    fn regression_gradient() {
        let f = SquaredResidual::new(vec![1.0, 2.0], 1.0).unwrap();
        assert_eq!(f.gradient(&[1.0, 1.0]), vec![2.0, 4.0]);
        assert_eq!(f.smoothness(), 5.0);
        assert_eq!(f.value(&[1.0, 1.0]), 2.0);
    }
}
