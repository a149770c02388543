//! Regularity measures and regret accounting.
//!
//! Every sum runs left to right in round order. [`Summation::Kahan`] swaps the
//! plain accumulator for compensated summation; the order stays the same, so
//! both modes are deterministic.

mod comparators;
mod variation;

pub use comparators::{
    comparator_minimizers, fixed_best, minimize_sum, ComparatorKind, ComparatorSequence,
};
pub use variation::{empirical_variation, function_variation, gradient_variation, VariationMethod};

use crate::error::{check_dim, Error, Result};
use crate::oracle::SharedObjective;
use crate::vector::{dist, dist_sq, DecisionVector};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Summation {
    #[default]
    Sequential,
    Kahan,
}

/// Running sum in a fixed accumulation order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Accumulator {
    mode: Summation,
    sum: f64,
    compensation: f64,
}

impl Accumulator {
    pub fn new(mode: Summation) -> Self {
        Self { mode, sum: 0.0, compensation: 0.0 }
    }

    pub fn add(&mut self, x: f64) -> f64 {
        match self.mode {
            Summation::Sequential => self.sum += x,
            Summation::Kahan => {
                let y = x - self.compensation;
                let t = self.sum + y;
                self.compensation = (t - self.sum) - y;
                self.sum = t;
            }
        }
        self.sum
    }

    pub fn value(&self) -> f64 {
        self.sum
    }
}

pub fn sum(values: impl IntoIterator<Item = f64>, mode: Summation) -> f64 {
    let mut acc = Accumulator::new(mode);
    for v in values {
        acc.add(v);
    }
    acc.value()
}

fn check_nonempty<T>(points: &[T]) -> Result<()> {
    if points.is_empty() {
        Err(Error::InvalidParameter("sequence is empty".into()))
    } else {
        Ok(())
    }
}

/// `P_T = Σ_{t≥2} ‖u_{t−1} − u_t‖₂`.
pub fn path_length<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    check_nonempty(points)?;
    check_same_dim(points)?;
    Ok(points.windows(2).map(|w| dist(w[0].as_ref(), w[1].as_ref())).sum())
}

/// `S_T = Σ_{t≥2} ‖u_{t−1} − u_t‖₂²`.
pub fn squared_path_length<P: AsRef<[f64]>>(points: &[P]) -> Result<f64> {
    check_nonempty(points)?;
    check_same_dim(points)?;
    Ok(points.windows(2).map(|w| dist_sq(w[0].as_ref(), w[1].as_ref())).sum())
}

fn check_same_dim<P: AsRef<[f64]>>(points: &[P]) -> Result<()> {
    let d = points[0].as_ref().len();
    points.iter().try_for_each(|p| check_dim(d, p.as_ref().len()))
}

/// `F_T = Σ_t f_t(u_t)`.
pub fn small_loss(functions: &[SharedObjective], comparators: &[DecisionVector], mode: Summation) -> Result<f64> {
    check_dim(functions.len(), comparators.len())?;
    Ok(sum(functions.iter().zip(comparators).map(|(f, u)| f.value(u)), mode))
}

/// Per-round regret curve plus the regularity measures of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RegretReport {
    /// `Σ_{s≤t} f_s(x_s)`.
    pub cumulative_loss: Vec<f64>,
    /// `Σ_{s≤t} f_s(u_s)`.
    pub cumulative_comparator_loss: Vec<f64>,
    pub path_length: f64,
    pub squared_path_length: f64,
    /// `V_T`, when computable for the environment.
    pub gradient_variation: Option<f64>,
    /// `V^f_T`, when computable for the environment.
    pub function_variation: Option<f64>,
    /// `V̄_T = Σ_{t≥2} ‖∇f_t(x_t) − ∇f_{t−1}(x_{t−1})‖²`.
    pub empirical_variation: f64,
    pub gradient_queries: u64,
    pub value_queries: u64,
    pub wall_clock_seconds: f64,
}

impl RegretReport {
    /// Cumulative curves from per-round learner and comparator losses.
    pub fn from_losses(losses: &[f64], comparator_losses: &[f64], mode: Summation) -> Result<Self> {
        check_dim(losses.len(), comparator_losses.len())?;
        let cumulate = |xs: &[f64]| {
            let mut acc = Accumulator::new(mode);
            xs.iter().map(|x| acc.add(*x)).collect::<Vec<_>>()
        };
        Ok(Self {
            cumulative_loss: cumulate(losses),
            cumulative_comparator_loss: cumulate(comparator_losses),
            ..Self::default()
        })
    }

    pub fn horizon(&self) -> usize {
        self.cumulative_loss.len()
    }

    /// Dynamic regret after round `t` (one-based).
    pub fn regret_at(&self, t: usize) -> f64 {
        self.cumulative_loss[t - 1] - self.cumulative_comparator_loss[t - 1]
    }

    pub fn dynamic_regret(&self) -> Vec<f64> {
        self.cumulative_loss.iter().zip(&self.cumulative_comparator_loss).map(|(a, b)| a - b).collect()
    }

    pub fn final_loss(&self) -> f64 {
        self.cumulative_loss.last().copied().unwrap_or(0.0)
    }

    /// `F_T`.
    pub fn small_loss(&self) -> f64 {
        self.cumulative_comparator_loss.last().copied().unwrap_or(0.0)
    }

    pub fn final_regret(&self) -> f64 {
        self.final_loss() - self.small_loss()
    }
}
