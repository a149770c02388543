use std::fmt::Write as _;

use crate::bandit::{bandit_pool, OptimismMode};
use crate::error::Result;
use crate::learners::StepSizePool;

/// Every default step-size grid for the given constants, by learner name.
pub fn default_pools(g: f64, d: f64, l: f64, t: usize, dim: usize) -> Result<Vec<(&'static str, StepSizePool)>> {
    Ok(vec![
        ("sword", StepSizePool::sword(g, d, l, t)?),
        ("swordpp", StepSizePool::swordpp(g, d, l, t)?),
        ("ader", StepSizePool::ader(g, d, t)?),
        ("sword_bandit_variation", bandit_pool(OptimismMode::Variation, g, d, l, t, dim)?),
        ("sword_bandit_zero", bandit_pool(OptimismMode::Zero, g, d, l, t, dim)?),
    ])
}

pub fn format_pools(pools: &[(&str, StepSizePool)]) -> String {
    let mut s = String::new();
    for (name, pool) in pools {
        let etas: Vec<String> = pool.etas().iter().map(|e| format!("{e:.6e}")).collect();
        let _ = writeln!(s, "{name}: N = {}, cap = {:.6e}", pool.len(), pool.cap());
        let _ = writeln!(s, "  [{}]", etas.join(", "));
    }
    s
}
