//! Test-local oracles: random quadratic streams and hand-written closed forms
//! that do not go through the library code under test.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;

use dynreg::envs::SequenceEnv;
use dynreg::oracle::{OracleConstants, SeparableQuadratic, SharedObjective};
use dynreg::FeasibleDomain;

/// Coefficients of `f_t(x) = Σ_j ½(a_{t,j} x_j − b_{t,j})²`.
#[derive(Debug, Clone)]
pub struct QuadStream {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl QuadStream {
    /// Coefficients drift by a bounded random walk so the stream is smooth.
    pub fn random<R: Rng>(rng: &mut R, dim: usize, horizon: usize, drift: f64) -> Self {
        let mut a: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.3..1.2)).collect();
        let mut b: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let (mut aa, mut bb) = (Vec::new(), Vec::new());
        for _ in 0..horizon {
            aa.push(a.clone());
            bb.push(b.clone());
            for j in 0..dim {
                a[j] = (a[j] + rng.gen_range(-drift..drift)).clamp(0.1, 1.5);
                b[j] = (b[j] + rng.gen_range(-drift..drift)).clamp(-1.5, 1.5);
            }
        }
        Self { a: aa, b: bb }
    }

    pub fn horizon(&self) -> usize {
        self.a.len()
    }

    pub fn dim(&self) -> usize {
        self.a[0].len()
    }

    pub fn value(&self, t: usize, x: &[f64]) -> f64 {
        (0..self.dim()).map(|j| 0.5 * (self.a[t][j] * x[j] - self.b[t][j]).powi(2)).sum()
    }

    pub fn gradient(&self, t: usize, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|j| self.a[t][j] * (self.a[t][j] * x[j] - self.b[t][j])).collect()
    }

    /// `max_t sup_{x ∈ [−r, r]^d} ‖∇f_t(x)‖`, attained coordinatewise at a vertex.
    pub fn box_gradient_bound(&self, r: f64) -> f64 {
        (0..self.horizon())
            .map(|t| {
                (0..self.dim())
                    .map(|j| (self.a[t][j].powi(2) * r + (self.a[t][j] * self.b[t][j]).abs()).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max_t sup_{‖x‖ ≤ r} ‖∇f_t(x)‖ ≤ max_j a_j²·r + ‖a∘b‖`, an upper bound.
    pub fn ball_gradient_bound(&self, r: f64) -> f64 {
        (0..self.horizon())
            .map(|t| {
                let lmax = self.a[t].iter().map(|a| a * a).fold(0.0, f64::max);
                let ab: f64 = (0..self.dim()).map(|j| (self.a[t][j] * self.b[t][j]).powi(2)).sum::<f64>().sqrt();
                lmax * r + ab
            })
            .fold(0.0, f64::max)
    }

    pub fn smoothness(&self) -> f64 {
        self.a.iter().flatten().map(|a| a * a).fold(0.0, f64::max)
    }

    /// `Σ_{t≥2} sup_{x ∈ [−r, r]^d} ‖∇f_t(x) − ∇f_{t−1}(x)‖²`: each coordinate of
    /// the difference is affine, `Δ(a²)x − Δ(ab)`, maximised at an endpoint.
    pub fn box_gradient_variation(&self, r: f64) -> f64 {
        (1..self.horizon())
            .map(|t| {
                (0..self.dim())
                    .map(|j| {
                        let da2 = self.a[t][j].powi(2) - self.a[t - 1][j].powi(2);
                        let dab = self.a[t][j] * self.b[t][j] - self.a[t - 1][j] * self.b[t - 1][j];
                        (da2.abs() * r + dab.abs()).powi(2)
                    })
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn functions(&self) -> Vec<SharedObjective> {
        (0..self.horizon())
            .map(|t| {
                Arc::new(SeparableQuadratic::new(self.a[t].clone(), self.b[t].clone(), 0.0).unwrap()) as SharedObjective
            })
            .collect()
    }

    pub fn env(&self, domain: FeasibleDomain, gradient_bound: f64) -> SequenceEnv {
        let constants = OracleConstants { gradient_bound, smoothness: self.smoothness(), nonnegative: true };
        SequenceEnv::new("random_quadratic", domain, constants, self.functions()).unwrap()
    }
}

pub fn clamp_box(x: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    x.iter().map(|v| v.clamp(lo, hi)).collect()
}

pub fn project_ball(x: &[f64], r: f64) -> Vec<f64> {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n <= r {
        x.to_vec()
    } else {
        x.iter().map(|v| v * r / n).collect()
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

/// `p_i ∝ exp(−ε(L_i + m_i))` written out directly.
pub fn softmax_weights(cumulative: &[f64], optimism: &[f64], rate: f64) -> Vec<f64> {
    let z: Vec<f64> = cumulative.iter().zip(optimism).map(|(l, m)| -rate * (l + m)).collect();
    let top = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - top).exp()).collect();
    let s: f64 = e.iter().sum();
    e.iter().map(|v| v / s).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn sample_std(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}
