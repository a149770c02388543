//! Two-point bandit convex optimisation.
//!
//! Each round the learner commits `y_t ± δe_{i_t}` for a uniformly sampled
//! coordinate `i_t`, observes the two loss values, and forms the central
//! difference `v = (f(y + δe_i) − f(y − δe_i))/(2δ)`. The gradient estimator
//! `g̃_t = d(v − M_{t,i})e_i + M_t` feeds the one-gradient ensemble, run on the
//! shrunk domain `(1 − α)X` so both committed points stay feasible.

mod learner;
mod optimism;

pub use learner::{BanditOptions, SwordBandit};
pub use optimism::{BanditOptimism, OptimismMode};

use crate::error::{check_dim, check_finite, Error, Result};
use crate::learners::StepSizePool;
use crate::vector::DecisionVector;

/// One round of two-point feedback around `base_point`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointQuery {
    base_point: DecisionVector,
    coordinate: usize,
    delta: f64,
}

impl TwoPointQuery {
    pub fn new(base_point: DecisionVector, coordinate: usize, delta: f64) -> Result<Self> {
        if coordinate >= base_point.dim() {
            return Err(Error::InvalidParameter(format!(
                "coordinate {coordinate} outside dimension {}",
                base_point.dim()
            )));
        }
        check_delta(delta)?;
        Ok(Self { base_point, coordinate, delta })
    }

    pub fn base_point(&self) -> &DecisionVector {
        &self.base_point
    }

    pub fn coordinate(&self) -> usize {
        self.coordinate
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `[y + δe_i, y − δe_i]`.
    pub fn committed(&self) -> [DecisionVector; 2] {
        let mut plus = self.base_point.to_vec();
        let mut minus = plus.clone();
        plus[self.coordinate] += self.delta;
        minus[self.coordinate] -= self.delta;
        [DecisionVector::from_raw(plus), DecisionVector::from_raw(minus)]
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("perturbation must be positive, got {delta}")))
    }
}

/// Central difference `(f(x⁽¹⁾) − f(x⁽²⁾))/(2δ)` with `x⁽¹⁾ = y + δe_i`.
pub fn finite_difference(value_plus: f64, value_minus: f64, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    check_finite(&[value_plus, value_minus], "bandit feedback")?;
    Ok((value_plus - value_minus) / (2.0 * delta))
}

/// `(g̃, M')` with `g̃ = d(v − M_i)e_i + M` and `M' = (v − M_i)e_i + M`.
pub fn estimate_gradient(v: f64, coordinate: usize, optimism: &[f64]) -> Result<(DecisionVector, DecisionVector)> {
    let d = optimism.len();
    if coordinate >= d {
        check_dim(d, coordinate + 1)?;
    }
    check_finite(&[v], "finite difference")?;
    check_finite(optimism, "bandit optimism")?;
    let innovation = v - optimism[coordinate];
    let mut estimator = optimism.to_vec();
    estimator[coordinate] += d as f64 * innovation;
    let mut next = optimism.to_vec();
    next[coordinate] = v;
    Ok((DecisionVector::from_raw(estimator), DecisionVector::from_raw(next)))
}

/// `C = 3√(d³ ln T)`.
pub fn bco_constant(dim: usize, horizon: f64) -> f64 {
    3.0 * ((dim as f64).powi(3) * horizon.ln()).sqrt()
}

/// Step-size grid `η_i = min(cap, √(D²/(8G²Td⁴))·2^{i−1})` with
/// `N = ⌈½log₂(G²Td⁴/(8D²L²))⌉ + 1`. The cap is `1/(4CL)` for the variation and
/// best modes and `1/(8L)` for the zero mode. The grid stops at its first
/// clamped entry.
pub fn bandit_pool(mode: OptimismMode, g: f64, d: f64, l: f64, t: usize, dim: usize) -> Result<StepSizePool> {
    crate::learners::pool_constants(g, d, l, t)?;
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be >= 1".into()));
    }
    if t < 2 {
        return Err(Error::InvalidParameter("bandit tuning needs T >= 2".into()));
    }
    let tf = t as f64;
    let d4 = (dim as f64).powi(4);
    let first = (d * d / (8.0 * g * g * tf * d4)).sqrt();
    let n = crate::learners::pool_grid_size(g * g * tf * d4 / (8.0 * d * d * l * l));
    let cap = match mode {
        OptimismMode::Zero => 1.0 / (8.0 * l),
        OptimismMode::Variation | OptimismMode::Best => 1.0 / (4.0 * bco_constant(dim, tf) * l),
    };
    StepSizePool::geometric(first, n, cap)
}
