use crate::error::{Error, Result};

/// Geometric grid of base-learner step sizes capped at `cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSizePool {
    etas: Vec<f64>,
    cap: f64,
}

impl StepSizePool {
    /// Arbitrary nondecreasing pool; entries must be positive and at most `cap`.
    pub fn new(etas: Vec<f64>, cap: f64) -> Result<Self> {
        if etas.is_empty() {
            return Err(Error::InvalidParameter("step-size pool is empty".into()));
        }
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::InvalidParameter(format!("pool cap must be positive, got {cap}")));
        }
        if etas.iter().any(|e| !(e.is_finite() && *e > 0.0 && *e <= cap)) {
            return Err(Error::InvalidParameter("pool entries must lie in (0, cap]".into()));
        }
        if etas.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParameter("pool entries must be nondecreasing".into()));
        }
        Ok(Self { etas, cap })
    }

    pub fn single(eta: f64) -> Result<Self> {
        Self::new(vec![eta], eta)
    }

    /// `η_i = min(cap, first · 2^{i−1})` for `i = 1..=count`, truncated after
    /// the first clamped entry so no two bases share a step size.
    pub fn geometric(first: f64, count: usize, cap: f64) -> Result<Self> {
        if !(first.is_finite() && first > 0.0) {
            return Err(Error::InvalidParameter(format!("first step size must be positive, got {first}")));
        }
        let mut etas = Vec::with_capacity(count.max(1));
        let mut eta = first;
        for _ in 0..count.max(1) {
            if eta >= cap {
                etas.push(cap);
                break;
            }
            etas.push(eta);
            eta *= 2.0;
        }
        Self::new(etas, cap)
    }

    /// Pool for the multi-gradient ensemble: `η_1 = √(D²/(8G²T))`,
    /// `N = ⌈½log₂(G²T/(2D²L²))⌉ + 1`, cap `1/(4L)`.
    pub fn sword(g: f64, d: f64, l: f64, t: usize) -> Result<Self> {
        check_constants(g, d, l, t)?;
        let t = t as f64;
        let first = (d * d / (8.0 * g * g * t)).sqrt();
        let n = grid_size(g * g * t / (2.0 * d * d * l * l));
        Self::geometric(first, n, 1.0 / (4.0 * l))
    }

    /// Pool for the one-gradient ensemble: `η_1 = √(D²/(8G²T))`,
    /// `N = ⌈½log₂(G²T/(8D²L²))⌉ + 1`, cap `1/(8L)`.
    pub fn swordpp(g: f64, d: f64, l: f64, t: usize) -> Result<Self> {
        check_constants(g, d, l, t)?;
        let t = t as f64;
        let first = (d * d / (8.0 * g * g * t)).sqrt();
        let n = grid_size(g * g * t / (8.0 * d * d * l * l));
        Self::geometric(first, n, 1.0 / (8.0 * l))
    }

    /// Pool for the OGD ensemble baseline: same `η_1` as [`Self::swordpp`],
    /// doubled until it reaches the cap `D/G`. Needs no smoothness constant.
    pub fn ader(g: f64, d: f64, t: usize) -> Result<Self> {
        check_constants(g, d, 1.0, t)?;
        let first = (d * d / (8.0 * g * g * t as f64)).sqrt();
        let cap = d / g;
        let n = ((cap / first).log2().ceil().max(0.0) as usize) + 1;
        Self::geometric(first, n, cap)
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }
}

/// `max(1, ⌈½log₂ ratio⌉ + 1)`.
pub(crate) fn grid_size(ratio: f64) -> usize {
    if ratio <= 1.0 {
        return 1;
    }
    (0.5 * ratio.log2()).ceil() as usize + 1
}

pub(crate) fn check_constants(g: f64, d: f64, l: f64, t: usize) -> Result<()> {
    for (name, v) in [("G", g), ("D", d), ("L", l)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
        }
    }
    if t == 0 {
        return Err(Error::InvalidParameter("horizon must be >= 1".into()));
    }
    Ok(())
}
