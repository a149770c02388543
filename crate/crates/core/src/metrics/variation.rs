use crate::domain::{DomainKind, FeasibleDomain};
use crate::error::{check_dim, Error, Result};
use crate::oracle::{SeparableQuadratic, SharedObjective};
use crate::vector::{dist_sq, DecisionVector};

/// How the supremum over the domain is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariationMethod {
    /// Exact for separable quadratics on a box (or any 1-D domain): each
    /// coordinate's supremum is attained at an endpoint or at the vertex.
    AnalyticQuadratic,
    /// Maximum over the first `samples` points of the domain's nested sample
    /// stream. A lower bound on the supremum, nondecreasing in `samples`.
    Grid { samples: usize },
}

/// `V_T = Σ_{t≥2} sup_x ‖∇f_t(x) − ∇f_{t−1}(x)‖₂²`.
pub fn gradient_variation(functions: &[SharedObjective], domain: &FeasibleDomain, method: VariationMethod) -> Result<f64> {
    check_functions(functions, domain)?;
    match method {
        VariationMethod::AnalyticQuadratic => {
            let (quads, bounds) = analytic_inputs(functions, domain)?;
            Ok(quads.windows(2).map(|w| gradient_gap(w[0], w[1], &bounds)).sum())
        }
        VariationMethod::Grid { samples } => {
            let pts = grid(domain, samples)?;
            let mut total = 0.0;
            let mut prev = vec![Vec::new(); pts.len()];
            for (t, f) in functions.iter().enumerate() {
                let mut worst = 0.0f64;
                for (p, old) in pts.iter().zip(prev.iter_mut()) {
                    let g = f.gradient(p);
                    if t > 0 {
                        worst = worst.max(dist_sq(&g, old));
                    }
                    *old = g;
                }
                total += worst;
            }
            Ok(total)
        }
    }
}

/// `V^f_T = Σ_{t≥2} sup_x |f_{t−1}(x) − f_t(x)|`.
pub fn function_variation(functions: &[SharedObjective], domain: &FeasibleDomain, method: VariationMethod) -> Result<f64> {
    check_functions(functions, domain)?;
    match method {
        VariationMethod::AnalyticQuadratic => {
            let (quads, bounds) = analytic_inputs(functions, domain)?;
            Ok(quads.windows(2).map(|w| value_gap(w[0], w[1], &bounds)).sum())
        }
        VariationMethod::Grid { samples } => {
            let pts = grid(domain, samples)?;
            Ok(functions
                .windows(2)
                .map(|w| pts.iter().map(|p| (w[0].value(p) - w[1].value(p)).abs()).fold(0.0, f64::max))
                .sum())
        }
    }
}

/// `V̄_T = Σ_{t≥2} ‖∇f_t(x_t) − ∇f_{t−1}(x_{t−1})‖₂²` along the played decisions.
pub fn empirical_variation(functions: &[SharedObjective], decisions: &[DecisionVector]) -> Result<f64> {
    check_dim(functions.len(), decisions.len())?;
    let mut total = 0.0;
    let mut prev: Option<Vec<f64>> = None;
    for (f, x) in functions.iter().zip(decisions) {
        check_dim(f.dim(), x.dim())?;
        let g = f.gradient(x);
        if let Some(p) = &prev {
            total += dist_sq(&g, p);
        }
        prev = Some(g);
    }
    Ok(total)
}

fn check_functions(functions: &[SharedObjective], domain: &FeasibleDomain) -> Result<()> {
    functions.iter().try_for_each(|f| check_dim(domain.dim(), f.dim()))
}

fn grid(domain: &FeasibleDomain, samples: usize) -> Result<Vec<Vec<f64>>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("grid needs at least one sample".into()));
    }
    Ok(domain.sample_points(samples))
}

/// Quadratics of the stream and the per-coordinate bounds of the domain.
type AnalyticInputs<'a> = (Vec<&'a SeparableQuadratic>, Vec<(f64, f64)>);

fn analytic_inputs<'a>(
    functions: &'a [SharedObjective],
    domain: &FeasibleDomain,
) -> Result<AnalyticInputs<'a>> {
    let bounds = coordinate_bounds(domain)
        .ok_or_else(|| Error::Unsupported("analytic variation needs a box or a one-dimensional domain".into()))?;
    let quads = functions
        .iter()
        .map(|f| f.as_separable_quadratic())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Unsupported("analytic variation needs separable quadratic losses".into()))?;
    Ok((quads, bounds))
}

/// Per-coordinate bounds when the domain is a product of intervals.
pub(crate) fn coordinate_bounds(domain: &FeasibleDomain) -> Option<Vec<(f64, f64)>> {
    match domain.kind() {
        DomainKind::Box { lower, upper } => Some(lower.iter().copied().zip(upper.iter().copied()).collect()),
        DomainKind::Ball { center, radius } if center.dim() == 1 => Some(vec![(center[0] - radius, center[0] + radius)]),
        DomainKind::Scaled { inner, factor } => {
            coordinate_bounds(inner).map(|b| b.into_iter().map(|(l, u)| (factor * l, factor * u)).collect())
        }
        _ => None,
    }
}

/// `sup_x ‖∇f(x) − ∇g(x)‖²`: each coordinate difference is affine in `x_j`.
fn gradient_gap(f: &SeparableQuadratic, g: &SeparableQuadratic, bounds: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for (j, (lo, hi)) in bounds.iter().enumerate() {
        let (a0, b0, a1, b1) = (f.a()[j], f.b()[j], g.a()[j], g.b()[j]);
        let slope = a1 * a1 - a0 * a0;
        let shift = a1 * b1 - a0 * b0;
        let at = |x: f64| (slope * x - shift).powi(2);
        total += at(*lo).max(at(*hi));
    }
    total
}

/// `sup_x |f(x) − g(x)|`: the difference is a sum of per-coordinate
/// quadratics, so its max and min are sums of per-coordinate extremes.
fn value_gap(f: &SeparableQuadratic, g: &SeparableQuadratic, bounds: &[(f64, f64)]) -> f64 {
    let mut hi_total = f.offset() - g.offset();
    let mut lo_total = hi_total;
    for (j, (lo, hi)) in bounds.iter().enumerate() {
        let (a0, b0, a1, b1) = (f.a()[j], f.b()[j], g.a()[j], g.b()[j]);
        let h = |x: f64| 0.5 * (a0 * x - b0).powi(2) - 0.5 * (a1 * x - b1).powi(2);
        let curvature = a0 * a0 - a1 * a1;
        let mut candidates = vec![h(*lo), h(*hi)];
        if curvature != 0.0 {
            let vertex = (a0 * b0 - a1 * b1) / curvature;
            if vertex > *lo && vertex < *hi {
                candidates.push(h(vertex));
            }
        }
        hi_total += candidates.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        lo_total += candidates.iter().copied().fold(f64::INFINITY, f64::min);
    }
    hi_total.abs().max(lo_total.abs())
}
