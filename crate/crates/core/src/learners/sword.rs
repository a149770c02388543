use crate::domain::FeasibleDomain;
use crate::error::{check_dim, Error, Result};
use crate::omd::softmax_into;
use crate::oracle::SmoothConvexOracle;
use crate::vector::{convex_combination, dist_sq, dot, entropy, norm_sq, step_into, DecisionVector};

use super::{OnlineLearner, Problem, QueryMark, RoundDiagnostics, RoundOutcome, StepSizePool};

/// Point at which a base evaluates the gradient that becomes its next optimism.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum GradientPoint {
    /// `∇f_t(x_{t,i})`, the same gradient the base just stepped with.
    #[default]
    Decision,
    /// `∇f_t(x̂_{t+1,i})`, one extra query per base.
    AuxiliaryIterate,
}

/// Overrides for [`Sword`]; `None` keeps the analysed default.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SwordOptions {
    pub pool: Option<StepSizePool>,
    pub gradient_point: GradientPoint,
    /// Cap on the self-confident meta rate, default `1/(4D²L)`.
    pub rate_cap: Option<f64>,
    /// Replaces the self-confident schedule by a constant meta rate.
    pub fixed_rate: Option<f64>,
}

/// Multi-gradient meta-base ensemble.
///
/// Base `i` runs OEGD on `f_t` itself with step `η_i`. The meta layer is
/// Optimistic Hedge with feedback `ℓ_{t,i} = ⟨∇f_t(x_t), x_{t,i}⟩` and
/// optimism `m_{t+1,i} = ⟨∇f_t(x̄_{t+1}), x_{t+1,i}⟩`, where
/// `x̄_{t+1} = Σ_i p_{t,i} x_{t+1,i}`. The self-confident rate is
/// `ε_t = min{1/(4D²L), √(ln N/(1 + 2D²Σ_{s<t}‖∇f_s(x_s) − ∇f_{s−1}(x_s)‖²))}`,
/// which re-queries the previous function at the new decision.
///
/// Gradient queries in round `t`: `N` base gradients, `∇f_t(x_t)`,
/// `∇f_t(x̄_{t+1})`, and `∇f_{t−1}(x_t)` for `t ≥ 2` under the self-confident
/// rate; the auxiliary-iterate variant adds `N`.
#[derive(Debug, Clone)]
pub struct Sword {
    domain: FeasibleDomain,
    etas: Vec<f64>,
    gradient_point: GradientPoint,
    fixed_rate: Option<f64>,
    cap: f64,
    scale: f64,
    ln_n: f64,
    x_hat: Vec<Vec<f64>>,
    x: Vec<Vec<f64>>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    optimism: Vec<f64>,
    deviation_sum: f64,
    epsilon: f64,
    decision: DecisionVector,
    previous: Option<SmoothConvexOracle>,
    scratch: Vec<f64>,
    logits: Vec<f64>,
    diagnostics: bool,
    t: usize,
}

impl Sword {
    pub fn new(problem: &Problem) -> Result<Self> {
        Self::with_options(problem, SwordOptions::default())
    }

    pub fn with_options(problem: &Problem, options: SwordOptions) -> Result<Self> {
        let l = problem.require_smooth("sword")?;
        let d = problem.diameter();
        let pool = match options.pool {
            Some(p) => p,
            None => StepSizePool::sword(problem.gradient_bound, d, l, problem.horizon)?,
        };
        if let Some(e) = options.fixed_rate {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidParameter(format!("fixed meta rate must be positive, got {e}")));
            }
        }
        let cap = options.rate_cap.unwrap_or(1.0 / (4.0 * d * d * l));
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::InvalidParameter(format!("meta rate cap must be positive, got {cap}")));
        }
        let n = pool.len();
        let start = problem.domain.origin_projection().into_vec();
        let mut sword = Self {
            domain: problem.domain.clone(),
            etas: pool.etas().to_vec(),
            gradient_point: options.gradient_point,
            fixed_rate: options.fixed_rate,
            cap,
            scale: 2.0 * d * d,
            ln_n: (n as f64).ln(),
            x_hat: vec![start.clone(); n],
            x: vec![start.clone(); n],
            weights: vec![1.0 / n as f64; n],
            cumulative: vec![0.0; n],
            optimism: vec![0.0; n],
            deviation_sum: 0.0,
            epsilon: 0.0,
            decision: DecisionVector::from_raw(start.clone()),
            previous: None,
            scratch: start,
            logits: vec![0.0; n],
            diagnostics: false,
            t: 0,
        };
        sword.epsilon = sword.rate_value();
        Ok(sword)
    }

    fn rate_value(&self) -> f64 {
        match self.fixed_rate {
            Some(e) => e,
            None => (self.ln_n / (1.0 + self.scale * self.deviation_sum)).sqrt().min(self.cap),
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn pool_size(&self) -> usize {
        self.etas.len()
    }

    fn snapshot(&self) -> RoundDiagnostics {
        RoundDiagnostics {
            weights: self.weights.clone(),
            base_decisions: self.x.iter().map(|x| DecisionVector::from_raw(x.clone())).collect(),
            meta_optimism: self.optimism.clone(),
            meta_losses: Vec::new(),
            meta_rate: self.epsilon,
            bandit: None,
        }
    }
}

impl OnlineLearner for Sword {
    fn name(&self) -> &str {
        "sword"
    }

    fn decision(&self) -> &DecisionVector {
        &self.decision
    }

    fn round(&mut self, oracle: &SmoothConvexOracle) -> Result<RoundOutcome> {
        check_dim(self.domain.dim(), oracle.dim())?;
        self.t += 1;
        let mark = QueryMark::new(oracle);
        let mut diag = self.diagnostics.then(|| self.snapshot());
        let weights_entropy = Some(entropy(&self.weights));
        let decision = self.decision.clone();
        let loss = oracle.value(&decision)?;
        let g = oracle.gradient(&decision)?;

        // Queries on a previous oracle that does not share this round's counter.
        let mut foreign = 0;
        if self.fixed_rate.is_none() {
            // ∇f_0 ≡ 0, so the first deviation is ‖∇f_1(x_1)‖².
            self.deviation_sum += match &self.previous {
                Some(prev) => {
                    let old = prev.gradient(&decision)?;
                    if !prev.counter().shares(oracle.counter()) {
                        foreign = 1;
                    }
                    dist_sq(&g, &old)
                }
                None => norm_sq(&g),
            };
        }

        let mut losses = vec![0.0; self.etas.len()];
        for (i, loss) in losses.iter_mut().enumerate() {
            let eta = self.etas[i];
            let h = oracle.gradient(&self.x[i])?;
            *loss = dot(&g, &self.x[i]);
            self.cumulative[i] += *loss;
            step_into(&mut self.scratch, &self.x_hat[i], eta, &h);
            self.domain.project_in_place(&mut self.scratch);
            std::mem::swap(&mut self.x_hat[i], &mut self.scratch);
            let hint = match self.gradient_point {
                GradientPoint::Decision => h,
                GradientPoint::AuxiliaryIterate => oracle.gradient(&self.x_hat[i])?,
            };
            step_into(&mut self.x[i], &self.x_hat[i], eta, &hint);
            self.domain.project_in_place(&mut self.x[i]);
        }

        convex_combination(&self.weights, &self.x, &mut self.scratch);
        let q = oracle.gradient(&self.scratch)?;
        for (m, x) in self.optimism.iter_mut().zip(&self.x) {
            *m = dot(&q, x);
        }

        self.epsilon = self.rate_value();
        if self.etas.len() > 1 {
            for ((l, c), m) in self.logits.iter_mut().zip(&self.cumulative).zip(&self.optimism) {
                *l = -self.epsilon * (c + m);
            }
            softmax_into(&self.logits, &mut self.weights);
        }
        convex_combination(&self.weights, &self.x, &mut self.scratch);
        self.decision = DecisionVector::from_raw(self.scratch.clone());
        if self.fixed_rate.is_none() {
            self.previous = Some(oracle.clone());
        }
        if let Some(d) = diag.as_mut() {
            d.meta_losses = losses;
        }
        let (gradient_queries, value_queries) = mark.since(oracle);
        Ok(RoundOutcome {
            t: self.t,
            decision,
            loss,
            gradient_queries: gradient_queries + foreign,
            value_queries,
            weights_entropy,
            warning: None,
            diagnostics: diag,
        })
    }

    fn gradient_budget(&self, t: usize) -> u64 {
        let n = self.etas.len() as u64;
        let rate_query = u64::from(self.fixed_rate.is_none() && t >= 2);
        let hint_queries = if self.gradient_point == GradientPoint::AuxiliaryIterate { n } else { 0 };
        n + 2 + rate_query + hint_queries
    }

    fn set_diagnostics(&mut self, enabled: bool) {
        self.diagnostics = enabled;
    }
}
