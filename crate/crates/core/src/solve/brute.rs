use std::time::Instant;

use super::{PlanSolution, PlanningInstance, SolverStats, TIE};
use crate::error::{Error, Result};

pub const BRUTE_FORCE_MAX_FEATURES: usize = 25;

/// Enumerates all `2^n` selections from the lexicographically largest down,
/// keeping the first one that is optimal.
pub fn brute_force(inst: &PlanningInstance) -> Result<PlanSolution> {
    let n = inst.len();
    if n > BRUTE_FORCE_MAX_FEATURES {
        return Err(Error::Guard(format!(
            "brute force refuses {n} features (limit {BRUTE_FORCE_MAX_FEATURES})"
        )));
    }
    let start = Instant::now();
    let mut x = vec![0u8; n];
    let mut best = f64::NEG_INFINITY;
    let mut best_x = vec![0u8; n];
    for mask in (0u64..(1u64 << n)).rev() {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((mask >> (n - 1 - i)) & 1) as u8;
        }
        if !inst.is_feasible(&x) {
            continue;
        }
        let obj = inst.objective(&x);
        if obj > best + TIE {
            best = obj;
            best_x.copy_from_slice(&x);
        }
    }
    let stats = SolverStats {
        method: "brute_force",
        nodes: 1u64 << n,
        wall_time: start.elapsed(),
    };
    Ok(PlanSolution::evaluate(inst, best_x, stats))
}
