use std::sync::Arc;

use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::oracle::{OracleConstants, SeparableQuadratic, SharedObjective};
use crate::vector::norm;

use super::Environment;

/// Scalar quadratics `f_t(x) = ½(a_t x − b_t)²` on `[−1, 1]`.
///
/// Instance 1 (odd `T`): `a_t = 0.5 − (t−1)/T`, `b_t = 1`. The minimisers
/// sit at `±1` and switch once, the gradient variation is `O(1)` and the
/// comparator loss grows linearly.
///
/// Instance 2 (even `T = 2K`): `(1, 1)` on odd and `(0.5, 0.5)` on even rounds
/// up to `K`, then `(1, −1)` and `(0.5, −0.5)`. Every minimiser attains zero
/// loss while the gradient variation grows linearly.
#[derive(Debug, Clone)]
pub struct QuadraticInstance {
    name: &'static str,
    domain: FeasibleDomain,
    a: Vec<f64>,
    b: Vec<f64>,
    constants: OracleConstants,
    functions: Vec<SharedObjective>,
}

impl QuadraticInstance {
    pub fn instance1(horizon: usize) -> Result<Self> {
        if horizon.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("instance1 needs an odd horizon, got {horizon}")));
        }
        let tf = horizon as f64;
        let a = (1..=horizon).map(|t| 0.5 - (t - 1) as f64 / tf).collect();
        Self::from_coefficients("instance1", a, vec![1.0; horizon])
    }

    pub fn instance2(horizon: usize) -> Result<Self> {
        if horizon == 0 || horizon % 2 == 1 {
            return Err(Error::InvalidParameter(format!("instance2 needs an even horizon, got {horizon}")));
        }
        let k = horizon / 2;
        let (mut a, mut b) = (Vec::with_capacity(horizon), Vec::with_capacity(horizon));
        for t in 1..=horizon {
            let scale = if t % 2 == 1 { 1.0 } else { 0.5 };
            let sign = if t <= k { 1.0 } else { -1.0 };
            a.push(scale);
            b.push(sign * scale);
        }
        Self::from_coefficients("instance2", a, b)
    }

    /// `G = max_t sup_{|x|≤1} |a_t² x − a_t b_t| = max_t (a_t² + |a_t b_t|)`, `L = max_t a_t²`.
    fn from_coefficients(name: &'static str, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        let gradient_bound = a.iter().zip(&b).map(|(a, b)| a * a + (a * b).abs()).fold(0.0, f64::max);
        let smoothness = a.iter().map(|a| a * a).fold(0.0, f64::max);
        let functions = a
            .iter()
            .zip(&b)
            .map(|(a, b)| Ok(Arc::new(SeparableQuadratic::scalar(*a, *b)?) as SharedObjective))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name,
            domain: FeasibleDomain::interval(-1.0, 1.0)?,
            a,
            b,
            constants: OracleConstants { gradient_bound, smoothness, nonnegative: true },
            functions,
        })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
}

impl Environment for QuadraticInstance {
    fn name(&self) -> &str {
        self.name
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
}

/// `f_t(x) = ½‖x − c‖²` every round on the centred ball of radius `r`.
#[derive(Debug, Clone)]
pub struct StationaryQuadratic {
    domain: FeasibleDomain,
    center: Vec<f64>,
    constants: OracleConstants,
    functions: Vec<SharedObjective>,
}

impl StationaryQuadratic {
    /// `G = r + ‖c‖`, `L = 1`.
    pub fn new(center: Vec<f64>, radius: f64, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be >= 1".into()));
        }
        let domain = FeasibleDomain::centered_ball(center.len(), radius)?;
        let f: SharedObjective = Arc::new(SeparableQuadratic::centered(&center)?);
        let constants = OracleConstants { gradient_bound: radius + norm(&center), smoothness: 1.0, nonnegative: true };
        Ok(Self { domain, center, constants, functions: vec![f; horizon] })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Environment for StationaryQuadratic {
    fn name(&self) -> &str {
        "stationary_quadratic"
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::ComparatorKind;

    #[test]
    fn parity_is_enforced() {
        assert!(QuadraticInstance::instance1(4).is_err());
        assert!(QuadraticInstance::instance2(5).is_err());
        assert!(QuadraticInstance::instance2(0).is_err());
    }

    #[test]
    fn instance1_first_coefficients() {
        let env = QuadraticInstance::instance1(5).unwrap();
        for (a, want) in env.a().iter().zip([0.5, 0.3, 0.1, -0.1, -0.3]) {
            assert!((a - want).abs() < 1e-15);
        }
        assert_eq!(env.constants().smoothness, 0.25);
        assert_eq!(env.constants().gradient_bound, 0.75);
    }

    #[test]
    fn instance2_minimizers_have_zero_loss() {
        let env = QuadraticInstance::instance2(8).unwrap();
        let u = env.comparators(ComparatorKind::Minimizers).unwrap();
        for (f, p) in env.functions().iter().zip(u.points()) {
            assert_eq!(f.value(p), 0.0);
        }
        let signs: Vec<f64> = u.points().iter().map(|p| p[0]).collect();
        assert_eq!(signs, vec![1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0, -1.0]);
    }

    #[test]
    fn stationary_constants() {
        let env = StationaryQuadratic::new(vec![0.3, -0.4], 1.0, 3).unwrap();
        assert_eq!(env.constants().gradient_bound, 1.5);
        assert_eq!(env.horizon(), 3);
    }
}
