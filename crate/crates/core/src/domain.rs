//! Convex feasible sets with closed-form Euclidean projections.
//!
//! Every set exposes its exact diameter `D`, a membership test, and the radius
//! of the largest origin-centred ball it contains. The last quantity drives the
//! shrunk domain `(1 - α)X` used by the bandit learner.

use crate::error::{check_dim, check_finite, Error, Result};
use crate::vector::{dist, norm, DecisionVector};

/// Membership tolerance used throughout the crate.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    Ball { center: DecisionVector, radius: f64 },
    Box { lower: DecisionVector, upper: DecisionVector },
    /// `factor · inner`; the inner set contains the origin.
    Scaled { inner: Box<FeasibleDomain>, factor: f64 },
    /// The probability simplex in `R^size`.
    Simplex { size: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleDomain {
    kind: DomainKind,
}

impl FeasibleDomain {
    pub fn ball(center: DecisionVector, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidDomain(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { kind: DomainKind::Ball { center, radius } })
    }

    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be >= 1".into()));
        }
        Self::ball(DecisionVector::zeros(dim), radius)
    }

    pub fn bounded_box(lower: DecisionVector, upper: DecisionVector) -> Result<Self> {
        check_dim(lower.dim(), upper.dim())?;
        if lower.iter().zip(upper.iter()).any(|(l, u)| l > u) {
            return Err(Error::InvalidDomain("box requires lower <= upper componentwise".into()));
        }
        if lower.iter().zip(upper.iter()).all(|(l, u)| l == u) {
            return Err(Error::InvalidDomain("box is a single point".into()));
        }
        Ok(Self { kind: DomainKind::Box { lower, upper } })
    }

    /// `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDomain("dimension must be >= 1".into()));
        }
        Self::bounded_box(DecisionVector::new(vec![lo; dim])?, DecisionVector::new(vec![hi; dim])?)
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::cube(1, lo, hi)
    }

    pub fn scaled(inner: FeasibleDomain, factor: f64) -> Result<Self> {
        if !(factor > 0.0 && factor <= 1.0) {
            return Err(Error::InvalidDomain(format!("scale factor must lie in (0, 1], got {factor}")));
        }
        if !inner.contains_origin() {
            return Err(Error::InvalidDomain("scaled domain requires an inner set containing the origin".into()));
        }
        Ok(Self { kind: DomainKind::Scaled { inner: Box::new(inner), factor } })
    }

    pub fn simplex(size: usize) -> Result<Self> {
        if size < 2 {
            return Err(Error::InvalidDomain("simplex needs at least two coordinates".into()));
        }
        Ok(Self { kind: DomainKind::Simplex { size } })
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        match &self.kind {
            DomainKind::Ball { center, .. } => center.dim(),
            DomainKind::Box { lower, .. } => lower.dim(),
            DomainKind::Scaled { inner, .. } => inner.dim(),
            DomainKind::Simplex { size } => *size,
        }
    }

    pub fn diameter(&self) -> f64 {
        match &self.kind {
            DomainKind::Ball { radius, .. } => 2.0 * radius,
            DomainKind::Box { lower, upper } => dist(lower, upper),
            DomainKind::Scaled { inner, factor } => factor * inner.diameter(),
            DomainKind::Simplex { .. } => std::f64::consts::SQRT_2,
        }
    }

    /// Largest `r ≥ 0` such that the centred ball of radius `r` lies inside the set.
    pub fn origin_inradius(&self) -> f64 {
        match &self.kind {
            DomainKind::Ball { center, radius } => (radius - center.norm()).max(0.0),
            DomainKind::Box { lower, upper } => lower
                .iter()
                .zip(upper.iter())
                .map(|(l, u)| (-l).min(*u))
                .fold(f64::INFINITY, f64::min)
                .max(0.0),
            DomainKind::Scaled { inner, factor } => factor * inner.origin_inradius(),
            DomainKind::Simplex { .. } => 0.0,
        }
    }

    pub fn contains_origin(&self) -> bool {
        self.contains(&vec![0.0; self.dim()], MEMBERSHIP_TOL)
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.kind {
            DomainKind::Ball { center, radius } => dist(x, center) <= radius + tol,
            DomainKind::Box { lower, upper } => {
                x.iter().zip(lower.iter()).zip(upper.iter()).all(|((v, l), u)| *v >= l - tol && *v <= u + tol)
            }
            DomainKind::Scaled { inner, factor } => {
                let y: Vec<f64> = x.iter().map(|v| v / factor).collect();
                inner.contains(&y, tol / factor)
            }
            DomainKind::Simplex { .. } => {
                x.iter().all(|v| *v >= -tol) && (x.iter().sum::<f64>() - 1.0).abs() <= tol * x.len() as f64
            }
        }
    }

    /// Euclidean projection with dimension and finiteness checks.
    pub fn project(&self, x: &[f64]) -> Result<DecisionVector> {
        check_dim(self.dim(), x.len())?;
        check_finite(x, "projection input")?;
        let mut out = x.to_vec();
        self.project_in_place(&mut out);
        Ok(DecisionVector::from_raw(out))
    }

    /// Projects a finite buffer of matching dimension in place.
    pub fn project_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim());
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                let r = dist(x, center);
                if r > *radius {
                    let s = radius / r;
                    for (v, c) in x.iter_mut().zip(center.iter()) {
                        *v = c + s * (*v - c);
                    }
                }
            }
            DomainKind::Box { lower, upper } => {
                for ((v, l), u) in x.iter_mut().zip(lower.iter()).zip(upper.iter()) {
                    *v = v.clamp(*l, *u);
                }
            }
            DomainKind::Scaled { inner, factor } => {
                x.iter_mut().for_each(|v| *v /= factor);
                inner.project_in_place(x);
                x.iter_mut().for_each(|v| *v *= factor);
            }
            DomainKind::Simplex { .. } => project_simplex_in_place(x),
        }
    }

    /// Projection of the origin; the default starting point of every learner.
    pub fn origin_projection(&self) -> DecisionVector {
        let mut x = vec![0.0; self.dim()];
        if let DomainKind::Simplex { size } = self.kind {
            x.fill(1.0 / size as f64);
        } else {
            self.project_in_place(&mut x);
        }
        DecisionVector::from_raw(x)
    }

    /// Deterministic nested sample stream: the first `n` points of the stream
    /// for `n' > n` contain the first `n` points for `n`. Extreme points come
    /// first, then a Halton sequence mapped into the set.
    pub fn sample_points(&self, n: usize) -> Vec<Vec<f64>> {
        let d = self.dim();
        let mut pts = Vec::with_capacity(n);
        match &self.kind {
            DomainKind::Ball { center, radius } => {
                for j in 0..d {
                    for s in [1.0, -1.0] {
                        let mut p = center.to_vec();
                        p[j] += s * radius;
                        pts.push(p);
                    }
                }
                let mut k = 1;
                while pts.len() < n {
                    let u: Vec<f64> = (0..d).map(|j| 2.0 * halton(k, PRIMES[j % PRIMES.len()]) - 1.0).collect();
                    k += 1;
                    if norm(&u) <= 1.0 {
                        pts.push(u.iter().zip(center.iter()).map(|(ui, c)| c + radius * ui).collect());
                    }
                }
            }
            DomainKind::Box { lower, upper } => {
                if d <= 12 {
                    for mask in 0..(1usize << d) {
                        pts.push((0..d).map(|j| if mask >> j & 1 == 1 { upper[j] } else { lower[j] }).collect());
                    }
                }
                let mut k = 1;
                while pts.len() < n {
                    pts.push(
                        (0..d).map(|j| lower[j] + (upper[j] - lower[j]) * halton(k, PRIMES[j % PRIMES.len()])).collect(),
                    );
                    k += 1;
                }
            }
            DomainKind::Scaled { inner, factor } => {
                pts = inner.sample_points(n);
                pts.iter_mut().for_each(|p| p.iter_mut().for_each(|v| *v *= factor));
            }
            DomainKind::Simplex { .. } => {
                for j in 0..d {
                    pts.push(DecisionVector::basis(d, j).into_vec());
                }
                let mut k = 1;
                while pts.len() < n {
                    let mut p: Vec<f64> = (0..d).map(|j| -halton(k, PRIMES[j % PRIMES.len()]).ln()).collect();
                    let s: f64 = p.iter().sum();
                    p.iter_mut().for_each(|v| *v /= s);
                    pts.push(p);
                    k += 1;
                }
            }
        }
        pts.truncate(n);
        pts
    }
}

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn halton(mut index: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while index > 0 {
        f /= base as f64;
        r += f * (index % base) as f64;
        index /= base;
    }
    r
}

/// Sort-based Euclidean projection onto the probability simplex.
fn project_simplex_in_place(x: &mut [f64]) {
    let mut u = x.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (j, uj) in u.iter().enumerate() {
        cumsum += uj;
        let t = (cumsum - 1.0) / (j + 1) as f64;
        if uj - t > 0.0 {
            theta = t;
        }
    }
    x.iter_mut().for_each(|v| *v = (*v - theta).max(0.0));
}
