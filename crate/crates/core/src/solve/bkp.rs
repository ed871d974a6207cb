use std::time::Instant;

use super::{density_order, fractional_bound, PlanSolution, PlanningInstance, SolverStats, TIE};
use crate::error::{Error, Result};

const COST_SCALE: f64 = 10.0;
const DP_MAX_CELLS: usize = 50_000_000;

/// Costs ×10 as integers, or `None` when some cost is not a multiple of 0.1.
fn scaled_costs(costs: &[f64]) -> Option<Vec<usize>> {
    costs
        .iter()
        .map(|&c| {
            let s = c * COST_SCALE;
            ((s - s.round()).abs() <= 1e-9).then_some(s.round() as usize)
        })
        .collect()
}

/// Dynamic program when costs are integral tenths and the table is of a
/// sane size; branch-and-bound otherwise.
pub fn solve_bkp(inst: &PlanningInstance) -> Result<PlanSolution> {
    inst.expect_model("bkp")?;
    let costs = inst.catalog().costs();
    let cap = (inst.budget() * COST_SCALE + 1e-9).floor();
    let fits = scaled_costs(&costs).is_some() && (cap + 1.0) * (costs.len() + 1) as f64 <= DP_MAX_CELLS as f64;
    if fits {
        solve_bkp_dp(inst)
    } else {
        solve_bkp_bnb(inst)
    }
}

/// Suffix table `f[i][c]` = best value from items `i..` within capacity `c`.
pub fn solve_bkp_dp(inst: &PlanningInstance) -> Result<PlanSolution> {
    inst.expect_model("bkp")?;
    let start = Instant::now();
    let costs = inst.catalog().costs();
    let values = inst.catalog().values();
    let w = scaled_costs(&costs)
        .ok_or_else(|| Error::Guard("dynamic program needs costs in multiples of 0.1".into()))?;
    let cap = (inst.budget() * COST_SCALE + 1e-9).floor() as usize;
    let n = costs.len();
    if (cap + 1) * (n + 1) > DP_MAX_CELLS {
        return Err(Error::Guard(format!("dynamic program table too large ({n} × {cap})")));
    }
    let width = cap + 1;
    let mut f = vec![0.0f64; (n + 1) * width];
    for i in (0..n).rev() {
        let (row, next) = f.split_at_mut((i + 1) * width);
        let row = &mut row[i * width..];
        for c in 0..width {
            let skip = next[c];
            row[c] = if w[i] <= c { skip.max(values[i] + next[c - w[i]]) } else { skip };
        }
    }
    let mut x = vec![0u8; n];
    let mut c = cap;
    for i in 0..n {
        let here = f[i * width + c];
        if w[i] <= c && values[i] + f[(i + 1) * width + c - w[i]] >= here - TIE {
            x[i] = 1;
            c -= w[i];
        }
    }
    let stats = SolverStats {
        method: "dp",
        nodes: (n * width) as u64,
        wall_time: start.elapsed(),
    };
    Ok(PlanSolution::evaluate(inst, x, stats))
}

struct Search<'a> {
    costs: &'a [f64],
    values: &'a [f64],
    order: Vec<usize>,
    x: Vec<u8>,
    best: f64,
    best_x: Option<Vec<u8>>,
    nodes: u64,
}

impl Search<'_> {
    fn dfs(&mut self, depth: usize, room: f64, value: f64) {
        self.nodes += 1;
        let n = self.x.len();
        if depth == n {
            if value > self.best + TIE {
                self.best = value;
                self.best_x = Some(self.x.clone());
            }
            return;
        }
        let bound = value
            + fractional_bound(
                self.order.iter().filter(|&&i| i >= depth).map(|&i| (self.values[i], self.costs[i])),
                room,
            );
        if bound + 1e-12 <= self.best + TIE {
            return;
        }
        if self.costs[depth] <= room + 1e-9 {
            self.x[depth] = 1;
            self.dfs(depth + 1, room - self.costs[depth], value + self.values[depth]);
        }
        self.x[depth] = 0;
        self.dfs(depth + 1, room, value);
    }
}

/// Depth-first in index order, 1 before 0, so the first optimum found is
/// the lexicographically largest.
pub fn solve_bkp_bnb(inst: &PlanningInstance) -> Result<PlanSolution> {
    inst.expect_model("bkp")?;
    let start = Instant::now();
    let costs = inst.catalog().costs();
    let values = inst.catalog().values();
    let n = costs.len();
    let order = density_order(&values, &costs);
    let mut room = inst.budget();
    let mut greedy = 0.0;
    for &i in &order {
        if costs[i] <= room + 1e-9 {
            room -= costs[i];
            greedy += values[i];
        }
    }
    let mut s = Search {
        costs: &costs,
        values: &values,
        order,
        x: vec![0; n],
        best: greedy - 2.0 * TIE,
        best_x: None,
        nodes: 0,
    };
    s.dfs(0, inst.budget(), 0.0);
    let x = s.best_x.unwrap_or_else(|| vec![0; n]);
    let stats = SolverStats {
        method: "branch_and_bound",
        nodes: s.nodes,
        wall_time: start.elapsed(),
    };
    Ok(PlanSolution::evaluate(inst, x, stats))
}
