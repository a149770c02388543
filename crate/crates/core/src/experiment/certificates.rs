use crate::error::{Error, Result};
use crate::learners::{Oegd, OnlineLearner, StepSizePool, Sword, SwordOptions};
use crate::vector::{l1_dist, linf_dist};

use super::runner::SeedContext;

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub name: String,
    pub algorithm: String,
    pub parameter: String,
    pub lhs: f64,
    pub rhs: f64,
    /// Allowed floating-point shortfall.
    pub tolerance: f64,
}

impl Certificate {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    pub fn holds(&self) -> bool {
        self.slack() >= -self.tolerance
    }
}

/// Dynamic-regret bound of OEGD with step `η ≤ 1/(4L)`:
/// `η(G² + 2V_T) + (D² + 2DP_T)/(2η)`.
pub fn oegd_regret_bound(eta: f64, g: f64, d: f64, variation: f64, path_length: f64) -> f64 {
    eta * (g * g + 2.0 * variation) + (d * d + 2.0 * d * path_length) / (2.0 * eta)
}

/// Optimistic Hedge with fixed rate `ε`, uniform `p_1`: the largest regret
/// against a single expert, and the bound
/// `εΣ‖ℓ_t − m_t‖∞² + ln N/ε − (1/(4ε))Σ_{t≥2}‖p_t − p_{t−1}‖₁²`.
pub fn hedge_regret_and_bound(weights: &[Vec<f64>], losses: &[Vec<f64>], optimism: &[Vec<f64>], rate: f64) -> (f64, f64) {
    let n = weights.first().map_or(1, Vec::len);
    let mut mixed = 0.0;
    let mut per_expert = vec![0.0; n];
    let mut error = 0.0;
    let mut movement = 0.0;
    for t in 0..weights.len() {
        let (p, l) = (&weights[t], &losses[t]);
        mixed += p.iter().zip(l).map(|(p, l)| p * l).sum::<f64>();
        per_expert.iter_mut().zip(l).for_each(|(c, l)| *c += l);
        error += linf_dist(l, &optimism[t]).powi(2);
        if t > 0 {
            movement += l1_dist(p, &weights[t - 1]).powi(2);
        }
    }
    let regret = per_expert.iter().map(|c| mixed - c).fold(f64::NEG_INFINITY, f64::max);
    let bound = rate * error + (n as f64).ln() / rate - movement / (4.0 * rate);
    (regret, bound)
}

/// Meta-regret bound of the multi-gradient ensemble under the oracle rate:
/// `2D√(2(G² + V_T) ln N) + 8D²L ln N`.
pub fn meta_regret_bound(g: f64, d: f64, l: f64, variation: f64, experts: usize) -> f64 {
    let ln_n = (experts as f64).ln();
    2.0 * d * (2.0 * (g * g + variation) * ln_n).sqrt() + 8.0 * d * d * l * ln_n
}

/// `min{1/(4D²L), √(ln N/(2D²(G² + V_T)))}`; the cap alone when `N = 1`.
pub fn oracle_meta_rate(g: f64, d: f64, l: f64, variation: f64, experts: usize) -> f64 {
    let cap = 1.0 / (4.0 * d * d * l);
    if experts < 2 {
        return cap;
    }
    cap.min(((experts as f64).ln() / (2.0 * d * d * (g * g + variation))).sqrt())
}

/// Certificates for the stream of `ctx` against its comparators.
///
/// Every step size of the multi-gradient pool is checked with OEGD, and the
/// ensemble is run with the oracle meta rate to check the Hedge bound and the
/// meta-regret bound. The bounds that depend on `V_T` need its exact value and
/// are skipped when the environment only admits a grid estimate.
pub fn check_bounds(ctx: &SeedContext) -> Result<Vec<Certificate>> {
    let env = ctx.env.as_ref();
    let p = &ctx.problem;
    let (g, d, l) = (p.gradient_bound, p.diameter(), p.smoothness);
    let variation = if ctx.exact_variation { ctx.gradient_variation } else { None };
    let pool = StepSizePool::sword(g, d, l, p.horizon)?;
    let mut certs = Vec::new();

    if let Some(v) = variation {
        for &eta in pool.etas() {
            let mut oegd = Oegd::new(p, eta)?;
            let mut regret = 0.0;
            for (t, u_loss) in ctx.comparator_losses.iter().enumerate() {
                regret += oegd.round(&env.next_round(t + 1)?)?.loss - u_loss;
            }
            certs.push(Certificate {
                name: "oegd_dynamic_regret".into(),
                algorithm: "oegd".into(),
                parameter: format!("eta={eta}"),
                lhs: regret,
                rhs: oegd_regret_bound(eta, g, d, v, ctx.comparators.path_length()),
                tolerance: 1e-6,
            });
        }
    }

    let rate = match variation {
        Some(v) => oracle_meta_rate(g, d, l, v, pool.len()),
        None => 1.0 / (4.0 * d * d * l),
    };
    let mut sword = Sword::with_options(p, SwordOptions { pool: Some(pool.clone()), fixed_rate: Some(rate), ..Default::default() })?;
    sword.set_diagnostics(true);
    let (mut weights, mut losses, mut optimism) = (Vec::new(), Vec::new(), Vec::new());
    for t in 1..=env.horizon() {
        let diag = sword
            .round(&env.next_round(t)?)?
            .diagnostics
            .ok_or_else(|| Error::Unsupported("ensemble did not record diagnostics".into()))?;
        weights.push(diag.weights);
        losses.push(diag.meta_losses);
        optimism.push(diag.meta_optimism);
    }
    let (regret, bound) = hedge_regret_and_bound(&weights, &losses, &optimism, rate);
    certs.push(Certificate {
        name: "optimistic_hedge_regret".into(),
        algorithm: "sword".into(),
        parameter: format!("epsilon={rate}"),
        lhs: regret,
        rhs: bound,
        tolerance: 1e-9,
    });
    if let Some(v) = variation {
        certs.push(Certificate {
            name: "sword_meta_regret".into(),
            algorithm: "sword".into(),
            parameter: format!("epsilon={rate}"),
            lhs: regret,
            rhs: meta_regret_bound(g, d, l, v, pool.len()),
            tolerance: 1e-9,
        });
    }
    Ok(certs)
}
