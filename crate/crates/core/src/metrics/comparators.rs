use crate::domain::FeasibleDomain;
use crate::error::{check_dim, Error, Result};
use crate::oracle::{Objective, SeparableQuadratic, SharedObjective};
use crate::vector::{dist, norm, DecisionVector};

/// Feasibility slack accepted for comparator points computed iteratively.
const COMPARATOR_TOL: f64 = 1e-9;

/// Where a comparator sequence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparatorKind {
    /// `u_t ∈ argmin_X f_t`.
    Minimizers,
    /// The best fixed point in hindsight, repeated.
    FixedBest,
    /// The environment's generating model.
    TrueModel,
    UserSupplied,
}

impl ComparatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComparatorKind::Minimizers => "minimizers",
            ComparatorKind::FixedBest => "fixed_best",
            ComparatorKind::TrueModel => "true_model",
            ComparatorKind::UserSupplied => "user",
        }
    }
}

/// `u_1, …, u_T`, all inside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorSequence {
    points: Vec<DecisionVector>,
    kind: ComparatorKind,
}

impl ComparatorSequence {
    pub fn new(points: Vec<DecisionVector>, kind: ComparatorKind, domain: &FeasibleDomain) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("comparator sequence is empty".into()));
        }
        for (t, u) in points.iter().enumerate() {
            check_dim(domain.dim(), u.dim())?;
            if !domain.contains(u, COMPARATOR_TOL) {
                return Err(Error::InvalidParameter(format!("comparator at round {} lies outside the domain", t + 1)));
            }
        }
        Ok(Self { points, kind })
    }

    pub fn points(&self) -> &[DecisionVector] {
        &self.points
    }

    pub fn kind(&self) -> ComparatorKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn path_length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(&w[0], &w[1])).sum()
    }
}

/// Per-round minimisers: closed form when the loss provides one, else an
/// accelerated projected gradient solve. A constant-zero curvature
/// coordinate resolves to the projection of the origin.
pub fn comparator_minimizers(functions: &[SharedObjective], domain: &FeasibleDomain) -> Result<ComparatorSequence> {
    let points = functions
        .iter()
        .map(|f| match f.minimizer(domain) {
            Some(u) => Ok(u),
            None => minimize_sum(std::slice::from_ref(f), domain),
        })
        .collect::<Result<Vec<_>>>()?;
    ComparatorSequence::new(points, ComparatorKind::Minimizers, domain)
}

/// `argmin_{u ∈ X} Σ_t f_t(u)` repeated for every round.
pub fn fixed_best(functions: &[SharedObjective], domain: &FeasibleDomain) -> Result<ComparatorSequence> {
    let u = minimize_sum(functions, domain)?;
    ComparatorSequence::new(vec![u; functions.len()], ComparatorKind::FixedBest, domain)
}

/// Minimiser of `Σ_t f_t` over the domain. Quadratic losses are aggregated
/// into one quadratic form first.
pub fn minimize_sum(functions: &[SharedObjective], domain: &FeasibleDomain) -> Result<DecisionVector> {
    if functions.is_empty() {
        return Err(Error::InvalidParameter("no functions to minimise".into()));
    }
    let d = domain.dim();
    functions.iter().try_for_each(|f| check_dim(d, f.dim()))?;

    if let Some(q) = aggregate_separable(functions) {
        if let Some(u) = q.minimizer(domain) {
            return Ok(u);
        }
    }
    if let Some((a, b)) = aggregate_quadratic_form(functions, d) {
        let lipschitz = (0..d).map(|i| a[i * d + i]).sum::<f64>();
        let gradient = |x: &[f64], out: &mut [f64]| {
            for i in 0..d {
                out[i] = (0..d).map(|j| a[i * d + j] * x[j]).sum::<f64>() - b[i];
            }
        };
        return Ok(accelerated_projected_gradient(domain, lipschitz, 50_000, gradient));
    }
    let lipschitz: f64 = functions.iter().map(|f| f.smoothness()).sum();
    let mut scratch = vec![0.0; d];
    let gradient = |x: &[f64], out: &mut [f64]| {
        out.fill(0.0);
        for f in functions {
            f.gradient_into(x, &mut scratch);
            out.iter_mut().zip(&scratch).for_each(|(o, g)| *o += g);
        }
    };
    Ok(accelerated_projected_gradient(domain, lipschitz, 5_000, gradient))
}

/// `Σ_t ½(a_t x − b_t)²` as a single separable quadratic with the same minimisers.
fn aggregate_separable(functions: &[SharedObjective]) -> Option<SeparableQuadratic> {
    let d = functions[0].dim();
    let mut curvature = vec![0.0; d];
    let mut linear = vec![0.0; d];
    for f in functions {
        let q = f.as_separable_quadratic()?;
        for j in 0..d {
            curvature[j] += q.a()[j] * q.a()[j];
            linear[j] += q.a()[j] * q.b()[j];
        }
    }
    let a: Vec<f64> = curvature.iter().map(|c| c.sqrt()).collect();
    let b = a.iter().zip(&linear).map(|(a, l)| if *a == 0.0 { 0.0 } else { l / a }).collect();
    SeparableQuadratic::new(a, b, 0.0).ok()
}

/// `(A, b)` with `Σ_t f_t(w) = ½wᵀAw − bᵀw + const` for quadratic losses.
fn aggregate_quadratic_form(functions: &[SharedObjective], d: usize) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut a = vec![0.0; d * d];
    let mut b = vec![0.0; d];
    for f in functions {
        if let Some(r) = f.as_squared_residual() {
            let x = r.feature();
            for i in 0..d {
                b[i] += r.target() * x[i];
                for j in 0..d {
                    a[i * d + j] += x[i] * x[j];
                }
            }
        } else {
            let q = f.as_separable_quadratic()?;
            for j in 0..d {
                a[j * d + j] += q.a()[j] * q.a()[j];
                b[j] += q.a()[j] * q.b()[j];
            }
        }
    }
    Some((a, b))
}

fn accelerated_projected_gradient(
    domain: &FeasibleDomain,
    lipschitz: f64,
    max_iter: usize,
    mut gradient: impl FnMut(&[f64], &mut [f64]),
) -> DecisionVector {
    let d = domain.dim();
    let step = 1.0 / lipschitz.max(1e-12);
    let mut x = domain.origin_projection().into_vec();
    let mut y = x.clone();
    let mut g = vec![0.0; d];
    let mut next = vec![0.0; d];
    let mut momentum = 1.0f64;
    for _ in 0..max_iter {
        gradient(&y, &mut g);
        for j in 0..d {
            next[j] = y[j] - step * g[j];
        }
        domain.project_in_place(&mut next);
        let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / momentum_next;
        let moved = dist(&next, &x);
        for j in 0..d {
            y[j] = next[j] + beta * (next[j] - x[j]);
        }
        std::mem::swap(&mut x, &mut next);
        momentum = momentum_next;
        if moved <= 1e-14 * (1.0 + norm(&x)) {
            break;
        }
    }
    domain.project_in_place(&mut x);
    DecisionVector::from_raw(x)
}
