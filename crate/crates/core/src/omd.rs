//! Two-step optimistic mirror descent.
//!
//! Each round first plays `x_t = argmin η⟨M_t, x⟩ + D_ψ(x, x̂_t)` against the
//! optimism `M_t`, then corrects the auxiliary iterate with the realised
//! gradient, `x̂_{t+1} = argmin η⟨∇f_t(x_t), x⟩ + D_ψ(x, x̂_t)`. The two phases
//! are separate calls so meta layers can interleave between them.
//!
//! With the Euclidean regulariser both phases are projected gradient steps.
//! With negative entropy on the simplex they are multiplicative-weights steps,
//! and iterating them reproduces Optimistic Hedge (see [`hedge_closed_form`]).

use crate::domain::{DomainKind, FeasibleDomain};
use crate::error::{check_dim, check_finite, Error, Result};
use crate::vector::{dist_sq, DecisionVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularizer {
    /// `ψ(x) = ½‖x‖²`, paired with `ℓ₂`.
    Euclidean,
    /// `ψ(x) = Σ x_i ln x_i` on the simplex, paired with `ℓ₁`.
    NegativeEntropy,
}

pub fn bregman(regularizer: Regularizer, x: &[f64], y: &[f64]) -> Result<f64> {
    check_dim(x.len(), y.len())?;
    check_finite(x, "bregman argument")?;
    check_finite(y, "bregman argument")?;
    match regularizer {
        Regularizer::Euclidean => Ok(0.5 * dist_sq(x, y)),
        Regularizer::NegativeEntropy => {
            if x.iter().chain(y).any(|v| *v <= 0.0) {
                return Err(Error::InvalidParameter("entropy divergence needs strictly positive arguments".into()));
            }
            Ok(x.iter().zip(y).map(|(a, b)| a * (a / b).ln()).sum())
        }
    }
}

/// `argmin_x ⟨cost, x⟩ + D_ψ(x, center)` over `domain`.
pub fn mirror_step(
    regularizer: Regularizer,
    domain: &FeasibleDomain,
    center: &[f64],
    cost: &[f64],
) -> Result<DecisionVector> {
    check_dim(domain.dim(), center.len())?;
    check_dim(domain.dim(), cost.len())?;
    check_finite(cost, "mirror step cost")?;
    match regularizer {
        Regularizer::Euclidean => {
            let shifted: Vec<f64> = center.iter().zip(cost).map(|(c, a)| c - a).collect();
            domain.project(&shifted)
        }
        Regularizer::NegativeEntropy => {
            if !matches!(domain.kind(), DomainKind::Simplex { .. }) {
                return Err(Error::Unsupported("negative entropy is defined on the simplex only".into()));
            }
            if center.iter().any(|v| v.is_nan() || *v <= 0.0) {
                return Err(Error::InvalidParameter("entropy iterate has left the open simplex".into()));
            }
            let logits: Vec<f64> = center.iter().zip(cost).map(|(c, a)| c.ln() - a).collect();
            Ok(DecisionVector::from_raw(softmax(&logits)))
        }
    }
}

/// Auxiliary iterate `x̂_t` and step size `η` of one OMD instance.
#[derive(Debug, Clone, PartialEq)]
pub struct OmdState {
    x_hat: DecisionVector,
    step_size: f64,
}

impl OmdState {
    pub fn new(x_hat: DecisionVector, step_size: f64) -> Result<Self> {
        check_step(step_size)?;
        Ok(Self { x_hat, step_size })
    }

    pub fn x_hat(&self) -> &DecisionVector {
        &self.x_hat
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    /// Replaces `η`; time-varying schedules rebuild the step each round.
    pub fn set_step_size(&mut self, step_size: f64) -> Result<()> {
        check_step(step_size)?;
        self.step_size = step_size;
        Ok(())
    }

    /// Phase 1: the decision played against `optimism`.
    pub fn decide(&self, optimism: &[f64], domain: &FeasibleDomain, reg: Regularizer) -> Result<DecisionVector> {
        check_finite(optimism, "optimism")?;
        let cost: Vec<f64> = optimism.iter().map(|m| self.step_size * m).collect();
        mirror_step(reg, domain, &self.x_hat, &cost)
    }

    /// Phase 2: moves `x̂_t` to `x̂_{t+1}` with the gradient observed at the decision.
    pub fn update(&mut self, gradient: &[f64], domain: &FeasibleDomain, reg: Regularizer) -> Result<()> {
        check_finite(gradient, "gradient")?;
        let cost: Vec<f64> = gradient.iter().map(|g| self.step_size * g).collect();
        self.x_hat = mirror_step(reg, domain, &self.x_hat, &cost)?;
        Ok(())
    }
}

fn check_step(step_size: f64) -> Result<()> {
    if step_size.is_finite() && step_size > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("step size must be positive, got {step_size}")))
    }
}

/// `p_i ∝ prior_i · exp(−ε(L_i + m_i))`, stabilised by subtracting the largest exponent.
pub fn hedge_closed_form(cumulative_losses: &[f64], optimism: &[f64], rate: f64, prior: &[f64]) -> Result<Vec<f64>> {
    check_dim(cumulative_losses.len(), optimism.len())?;
    check_dim(cumulative_losses.len(), prior.len())?;
    if cumulative_losses.is_empty() {
        return Err(Error::InvalidParameter("hedge needs at least one expert".into()));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!("hedge rate must be positive, got {rate}")));
    }
    check_finite(cumulative_losses, "hedge losses")?;
    check_finite(optimism, "hedge optimism")?;
    check_finite(prior, "hedge prior")?;
    if prior.iter().any(|p| *p < 0.0) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter("hedge prior must lie on the simplex".into()));
    }
    let logits: Vec<f64> = cumulative_losses
        .iter()
        .zip(optimism)
        .zip(prior)
        .map(|((l, m), p)| if *p > 0.0 { p.ln() - rate * (l + m) } else { f64::NEG_INFINITY })
        .collect();
    Ok(softmax(&logits))
}

pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; logits.len()];
    softmax_into(logits, &mut out);
    out
}

pub(crate) fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        total += *o;
    }
    out.iter_mut().for_each(|o| *o /= total);
}

/// Optimistic Hedge with a fixed rate.
#[derive(Debug, Clone)]
pub struct OptimisticHedge {
    prior: Vec<f64>,
    cumulative: Vec<f64>,
    rate: f64,
}

impl OptimisticHedge {
    pub fn new(experts: usize, rate: f64) -> Result<Self> {
        if experts == 0 {
            return Err(Error::InvalidParameter("hedge needs at least one expert".into()));
        }
        Self::with_prior(vec![1.0 / experts as f64; experts], rate)
    }

    pub fn with_prior(prior: Vec<f64>, rate: f64) -> Result<Self> {
        let cumulative = vec![0.0; prior.len()];
        hedge_closed_form(&cumulative, &cumulative, rate, &prior)?;
        Ok(Self { prior, cumulative, rate })
    }

    /// `p_t` given the optimism `m_t` for the coming round.
    pub fn weights(&self, optimism: &[f64]) -> Result<Vec<f64>> {
        hedge_closed_form(&self.cumulative, optimism, self.rate, &self.prior)
    }

    pub fn observe(&mut self, loss: &[f64]) -> Result<()> {
        check_dim(self.cumulative.len(), loss.len())?;
        check_finite(loss, "hedge loss")?;
        self.cumulative.iter_mut().zip(loss).for_each(|(c, l)| *c += l);
        Ok(())
    }

    pub fn cumulative_losses(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(v: &[f64]) -> DecisionVector {
        DecisionVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn euclidean_two_step_on_interval() {
        let dom = FeasibleDomain::interval(-1.0, 1.0).unwrap();
        let mut s = OmdState::new(dv(&[0.0]), 1.0).unwrap();
        let x = s.decide(&[0.5], &dom, Regularizer::Euclidean).unwrap();
        assert_eq!(x[0], -0.5);
        s.update(&[2.0], &dom, Regularizer::Euclidean).unwrap();
        assert_eq!(s.x_hat()[0], -1.0);
    }

    #[test]
    fn zero_optimism_plays_the_auxiliary_iterate() {
        let simplex = FeasibleDomain::simplex(3).unwrap();
        let s = OmdState::new(dv(&[0.2, 0.3, 0.5]), 7.0).unwrap();
        let x = s.decide(&[0.0; 3], &simplex, Regularizer::NegativeEntropy).unwrap();
        for (a, b) in x.iter().zip(s.x_hat().iter()) {
            assert!((a - b).abs() < 1e-15);
        }
        let ball = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let e = OmdState::new(dv(&[0.1, 0.2]), 3.0).unwrap();
        assert_eq!(e.decide(&[0.0, 0.0], &ball, Regularizer::Euclidean).unwrap(), dv(&[0.1, 0.2]));
    }

    #[test]
    fn entropy_decision_is_softmax() {
        let simplex = FeasibleDomain::simplex(2).unwrap();
        let s = OmdState::new(dv(&[0.5, 0.5]), 1.0).unwrap();
        let x = s.decide(&[0.0, 2f64.ln()], &simplex, Regularizer::NegativeEntropy).unwrap();
        assert!((x[0] - 2.0 / 3.0).abs() < 1e-15 && (x[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn entropy_rejects_boundary_iterate_and_non_simplex_domain() {
        let simplex = FeasibleDomain::simplex(2).unwrap();
        let s = OmdState::new(dv(&[1.0, 0.0]), 1.0).unwrap();
        assert!(s.decide(&[0.0, 0.0], &simplex, Regularizer::NegativeEntropy).is_err());
        let ball = FeasibleDomain::centered_ball(2, 1.0).unwrap();
        let t = OmdState::new(dv(&[0.5, 0.5]), 1.0).unwrap();
        assert!(t.decide(&[0.0, 0.0], &ball, Regularizer::NegativeEntropy).is_err());
        assert!(t.decide(&[f64::NAN, 0.0], &simplex, Regularizer::NegativeEntropy).is_err());
    }

    #[test]
    fn bregman_values() {
        assert_eq!(bregman(Regularizer::Euclidean, &[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(bregman(Regularizer::Euclidean, &[1.0, 0.0], &[0.0, 0.0]).unwrap(), 0.5);
        let kl = bregman(Regularizer::NegativeEntropy, &[0.5, 0.5], &[0.25, 0.75]).unwrap();
        let oracle = 0.5 * (0.5f64 / 0.25).ln() + 0.5 * (0.5f64 / 0.75).ln();
        assert!((kl - oracle).abs() < 1e-15);
        assert!((kl - 0.14384).abs() < 1e-5);
        assert!(bregman(Regularizer::NegativeEntropy, &[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn hedge_examples() {
        let u = [0.5, 0.5];
        assert_eq!(hedge_closed_form(&[0.0, 0.0], &[0.0, 0.0], 1.0, &u).unwrap(), vec![0.5, 0.5]);
        let p = hedge_closed_form(&[0.0, 1.0], &[0.0, 0.0], 2f64.ln(), &u).unwrap();
        assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!(hedge_closed_form(&[0.0], &[0.0], 0.0, &[1.0]).is_err());
        assert!(hedge_closed_form(&[f64::NAN], &[0.0], 1.0, &[1.0]).is_err());
    }

    #[test]
    fn hedge_survives_huge_losses() {
        let p = hedge_closed_form(&[1e308, 1e308 * 0.5], &[0.0, 0.0], 1.0, &[0.5, 0.5]).unwrap();
        assert_eq!(p, vec![0.0, 1.0]);
    }
}
