//! One-gradient meta-base ensemble shared by Sword++, the OGD ensemble
//! baseline and the bandit learner.
//!
//! Every base runs Euclidean OMD on the linear surrogate `⟨g_t, x⟩`. The meta
//! layer is Optimistic Hedge over the corrected losses
//! `ℓ_{t,i} = ⟨g_t, x_{t,i}⟩ + λ‖x_{t,i} − x_{t−1,i}‖²` with optimism
//! `m_{t+1,i} = ⟨M_{t+1}, x_{t+1,i}⟩ + λ‖x_{t+1,i} − x_{t,i}‖²`.

use crate::domain::FeasibleDomain;
use crate::error::{Error, Result};
use crate::omd::softmax_into;
use crate::vector::{convex_combination, dist_sq, dot, entropy, step_into, DecisionVector};

use super::RoundDiagnostics;

/// Meta learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetaRate {
    /// `ε_t = min{cap, √(ln N / (1 + scale · Σ_{s<t} δ_s))}` over the deviations
    /// `δ_s` supplied each round.
    SelfConfident { cap: Option<f64>, scale: f64 },
    Fixed(f64),
}

impl MetaRate {
    pub(crate) fn validate(&self) -> Result<()> {
        let ok = match *self {
            MetaRate::SelfConfident { cap, scale } => {
                scale.is_finite() && scale >= 0.0 && cap.is_none_or(|c| c.is_finite() && c > 0.0)
            }
            MetaRate::Fixed(e) => e.is_finite() && e > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid meta rate {self:?}")))
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct EnsembleCore {
    domain: FeasibleDomain,
    etas: Vec<f64>,
    lambda: f64,
    rate: MetaRate,
    ln_n: f64,
    x_hat: Vec<Vec<f64>>,
    /// `x_{t,i}`.
    x: Vec<Vec<f64>>,
    /// `x_{t−1,i}`.
    x_prev: Vec<Vec<f64>>,
    /// `p_t`.
    weights: Vec<f64>,
    /// `Σ_{s<t} ℓ_{s,i}`.
    cumulative: Vec<f64>,
    /// `m_t`.
    optimism: Vec<f64>,
    /// `ℓ_{t−1}`, the most recent feedback.
    last_losses: Vec<f64>,
    deviation_sum: f64,
    epsilon: f64,
    /// `x_t = Σ_i p_{t,i} x_{t,i}`.
    combined: Vec<f64>,
    logits: Vec<f64>,
}

impl EnsembleCore {
    pub(crate) fn new(
        domain: FeasibleDomain,
        etas: &[f64],
        start: &[f64],
        lambda: f64,
        rate: MetaRate,
    ) -> Result<Self> {
        rate.validate()?;
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("correction coefficient must be >= 0, got {lambda}")));
        }
        let start = domain.project(start)?.into_vec();
        let n = etas.len();
        let mut core = Self {
            etas: etas.to_vec(),
            lambda,
            rate,
            ln_n: (n as f64).ln(),
            x_hat: vec![start.clone(); n],
            x: vec![start.clone(); n],
            x_prev: vec![start.clone(); n],
            weights: vec![1.0 / n as f64; n],
            cumulative: vec![0.0; n],
            optimism: vec![0.0; n],
            last_losses: vec![0.0; n],
            deviation_sum: 0.0,
            epsilon: 0.0,
            combined: start,
            logits: vec![0.0; n],
            domain,
        };
        core.epsilon = core.rate_value();
        Ok(core)
    }

    fn rate_value(&self) -> f64 {
        match self.rate {
            MetaRate::Fixed(e) => e,
            MetaRate::SelfConfident { cap, scale } => {
                let e = (self.ln_n / (1.0 + scale * self.deviation_sum)).sqrt();
                cap.map_or(e, |c| e.min(c))
            }
        }
    }

    pub(crate) fn combined(&self) -> &[f64] {
        &self.combined
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub(crate) fn dim(&self) -> usize {
        self.combined.len()
    }

    pub(crate) fn len(&self) -> usize {
        self.etas.len()
    }

    pub(crate) fn weights_entropy(&self) -> f64 {
        entropy(&self.weights)
    }

    /// State behind the current decision; `meta_losses` is filled after the step.
    pub(crate) fn snapshot(&self) -> RoundDiagnostics {
        RoundDiagnostics {
            weights: self.weights.clone(),
            base_decisions: self.x.iter().map(|x| DecisionVector::from_raw(x.clone())).collect(),
            meta_optimism: self.optimism.clone(),
            meta_losses: Vec::new(),
            meta_rate: self.epsilon,
            bandit: None,
        }
    }

    pub(crate) fn last_losses(&self) -> &[f64] {
        &self.last_losses
    }

    /// Consumes the round's feedback gradient `g`, the next optimism `m_next`
    /// and the rate deviation `δ_t`, and prepares round `t + 1`.
    pub(crate) fn step(&mut self, g: &[f64], m_next: &[f64], deviation: f64) {
        let lambda = self.lambda;
        for i in 0..self.etas.len() {
            let eta = self.etas[i];
            let loss = dot(g, &self.x[i]) + lambda * dist_sq(&self.x[i], &self.x_prev[i]);
            self.last_losses[i] = loss;
            self.cumulative[i] += loss;
            std::mem::swap(&mut self.x[i], &mut self.x_prev[i]);

            let mut x_hat = std::mem::take(&mut self.x_hat[i]);
            let mut scratch = std::mem::take(&mut self.x[i]);
            step_into(&mut scratch, &x_hat, eta, g);
            self.domain.project_in_place(&mut scratch);
            std::mem::swap(&mut x_hat, &mut scratch);
            step_into(&mut scratch, &x_hat, eta, m_next);
            self.domain.project_in_place(&mut scratch);
            self.x_hat[i] = x_hat;
            self.x[i] = scratch;

            self.optimism[i] = dot(m_next, &self.x[i]) + lambda * dist_sq(&self.x[i], &self.x_prev[i]);
        }
        self.deviation_sum += deviation;
        self.epsilon = self.rate_value();
        if self.etas.len() > 1 {
            for ((l, c), m) in self.logits.iter_mut().zip(&self.cumulative).zip(&self.optimism) {
                *l = -self.epsilon * (c + m);
            }
            softmax_into(&self.logits, &mut self.weights);
        }
        convex_combination(&self.weights, &self.x, &mut self.combined);
    }
}
