use crate::error::{check_dim, Error, Result};
use crate::omd::hedge_closed_form;
use crate::vector::{dist_sq, norm_sq, DecisionVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptimismMode {
    /// `M_t = M^var_t`, the latest finite difference per coordinate.
    Variation,
    /// `M_t = 0`.
    Zero,
    /// `M_t = γ_t M^var_t` with `γ_t` learned by Hedge.
    Best,
}

impl OptimismMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OptimismMode::Variation => "variation",
            OptimismMode::Zero => "zero",
            OptimismMode::Best => "best",
        }
    }
}

impl std::str::FromStr for OptimismMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variation" => Ok(OptimismMode::Variation),
            "zero" => Ok(OptimismMode::Zero),
            "best" => Ok(OptimismMode::Best),
            other => Err(Error::InvalidParameter(format!("unknown optimism mode `{other}`"))),
        }
    }
}

/// Optimism state of the bandit learner.
///
/// `M^var` is tracked in every mode; the best mode mixes it with the zero
/// optimism using Hedge over the squared deviations `½‖g̃_t − M‖²` at rate
/// `1/(4d²G²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditOptimism {
    mode: OptimismMode,
    current: DecisionVector,
    variation: DecisionVector,
    gamma: f64,
    cumulative: [f64; 2],
    hedge_rate: f64,
}

impl BanditOptimism {
    pub fn new(mode: OptimismMode, dim: usize, gradient_bound: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        if !(gradient_bound.is_finite() && gradient_bound > 0.0) {
            return Err(Error::InvalidParameter(format!("G must be positive, got {gradient_bound}")));
        }
        let d = dim as f64;
        Ok(Self {
            mode,
            current: DecisionVector::zeros(dim),
            variation: DecisionVector::zeros(dim),
            gamma: 0.5,
            cumulative: [0.0; 2],
            hedge_rate: 1.0 / (4.0 * d * d * gradient_bound * gradient_bound),
        })
    }

    pub fn mode(&self) -> OptimismMode {
        self.mode
    }

    /// `M_t`.
    pub fn current(&self) -> &DecisionVector {
        &self.current
    }

    /// `M^var_t`.
    pub fn variation(&self) -> &DecisionVector {
        &self.variation
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hedge_rate(&self) -> f64 {
        self.hedge_rate
    }

    pub fn cumulative_expert_losses(&self) -> [f64; 2] {
        self.cumulative
    }

    /// Moves to round `t + 1` after observing `v` on `coordinate` and the
    /// estimator `g̃_t`; returns `M_{t+1}`.
    pub fn advance(&mut self, estimator: &[f64], v: f64, coordinate: usize) -> Result<&DecisionVector> {
        check_dim(self.variation.dim(), estimator.len())?;
        let mut next_var = self.variation.to_vec();
        next_var[coordinate] = v;
        let next_var = DecisionVector::from_raw(next_var);
        match self.mode {
            OptimismMode::Variation => {
                self.variation = next_var;
                self.current = self.variation.clone();
            }
            OptimismMode::Zero => {
                self.variation = next_var;
            }
            OptimismMode::Best => {
                let prev_var = std::mem::replace(&mut self.variation, next_var);
                self.learn_best_optimism(estimator, &prev_var)?;
            }
        }
        Ok(&self.current)
    }

    /// Hedge step over the two experts `M^var` and `0`, charged
    /// `½‖g̃_t − M^var_t‖²` and `½‖g̃_t‖²`. Expects `self.variation` to already
    /// hold `M^var_{t+1}`.
    pub fn learn_best_optimism(&mut self, estimator: &[f64], variation_t: &[f64]) -> Result<()> {
        if self.mode != OptimismMode::Best {
            return Err(Error::Unsupported("best-optimism learning requires best mode".into()));
        }
        check_dim(self.variation.dim(), variation_t.len())?;
        self.cumulative[0] += 0.5 * dist_sq(estimator, variation_t);
        self.cumulative[1] += 0.5 * norm_sq(estimator);
        self.gamma = best_weight(self.cumulative, self.hedge_rate)?;
        self.current = DecisionVector::from_raw(self.variation.iter().map(|m| self.gamma * m).collect());
        Ok(())
    }
}

/// Hedge weight of the first expert given both cumulative losses.
pub(crate) fn best_weight(cumulative: [f64; 2], rate: f64) -> Result<f64> {
    Ok(hedge_closed_form(&cumulative, &[0.0, 0.0], rate, &[0.5, 0.5])?[0])
}
