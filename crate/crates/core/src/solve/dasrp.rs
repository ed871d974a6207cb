use std::time::Instant;

use super::value::penalty_term;
use super::{density_order, fractional_bound, overall_value, sort_by_density, PlanSolution, PlanningInstance, SolverStats, TIE};
use crate::error::Result;

struct Search<'a> {
    inst: &'a PlanningInstance,
    costs: &'a [f64],
    values: &'a [f64],
    x: Vec<u8>,
    /// Penalty lower bound from the features decided so far.
    plb: Vec<f64>,
    undo: Vec<(usize, f64)>,
    scratch: Vec<usize>,
    weights: Vec<f64>,
    best: f64,
    best_x: Option<Vec<u8>>,
    nodes: u64,
}

impl Search<'_> {
    fn decide(&mut self, k: usize, b: u8) {
        self.x[k] = b;
        let d = self.inst.influence();
        for i in 0..self.x.len() {
            if i == k {
                continue;
            }
            let t = penalty_term(d.get(i, k), b);
            if t > self.plb[i] {
                self.undo.push((i, self.plb[i]));
                self.plb[i] = t;
            }
        }
    }

    fn revert(&mut self, mark: usize) {
        while self.undo.len() > mark {
            let (i, old) = self.undo.pop().expect("undo above mark");
            self.plb[i] = old;
        }
    }

    /// Selected features at their penalty lower bound, plus a fractional
    /// knapsack over the undecided ones valued the same way.
    fn bound(&mut self, depth: usize, room: f64) -> f64 {
        let mut fixed = 0.0;
        for i in 0..depth {
            if self.x[i] == 1 {
                fixed += self.values[i] * (1.0 - self.plb[i]);
            }
        }
        for i in depth..self.x.len() {
            self.weights[i] = self.values[i] * (1.0 - self.plb[i]);
        }
        self.scratch.clear();
        self.scratch.extend(depth..self.x.len());
        let mut idx = std::mem::take(&mut self.scratch);
        sort_by_density(&mut idx, &self.weights, self.costs);
        let rest = fractional_bound(idx.iter().map(|&i| (self.weights[i], self.costs[i])), room);
        self.scratch = idx;
        fixed + rest
    }

    fn dfs(&mut self, depth: usize, room: f64) {
        self.nodes += 1;
        let n = self.x.len();
        if depth == n {
            let (_, ov) = overall_value(self.inst.catalog(), self.inst.influence(), &self.x);
            if ov > self.best + TIE {
                self.best = ov;
                self.best_x = Some(self.x.clone());
            }
            return;
        }
        if self.bound(depth, room) + 1e-12 <= self.best + TIE {
            return;
        }
        let mark = self.undo.len();
        if self.costs[depth] <= room + 1e-9 {
            self.decide(depth, 1);
            self.dfs(depth + 1, room - self.costs[depth]);
            self.revert(mark);
        }
        self.decide(depth, 0);
        self.dfs(depth + 1, room);
        self.revert(mark);
    }
}

/// Greedy by value density, then drop any feature whose removal raises OV.
fn greedy_seed(inst: &PlanningInstance, costs: &[f64], values: &[f64]) -> f64 {
    let n = costs.len();
    let mut x = vec![0u8; n];
    let mut room = inst.budget();
    for i in density_order(values, costs) {
        if costs[i] <= room + 1e-9 {
            room -= costs[i];
            x[i] = 1;
        }
    }
    let mut best = inst.objective(&x);
    loop {
        let mut improved = false;
        for i in 0..n {
            if x[i] == 1 {
                x[i] = 0;
                let ov = inst.objective(&x);
                if ov > best + TIE {
                    best = ov;
                    improved = true;
                } else {
                    x[i] = 1;
                }
            }
        }
        if !improved {
            return best;
        }
    }
}

/// Branch-and-bound on OV in index order, 1 before 0.
pub fn solve_dasrp(inst: &PlanningInstance) -> Result<PlanSolution> {
    inst.expect_model("dasrp")?;
    let start = Instant::now();
    let costs = inst.catalog().costs();
    let values = inst.catalog().values();
    let n = costs.len();
    let seed = greedy_seed(inst, &costs, &values);
    let mut s = Search {
        inst,
        costs: &costs,
        values: &values,
        x: vec![0; n],
        plb: vec![0.0; n],
        undo: Vec::new(),
        scratch: Vec::with_capacity(n),
        weights: vec![0.0; n],
        best: seed - 2.0 * TIE,
        best_x: None,
        nodes: 0,
    };
    s.dfs(0, inst.budget());
    let x = s.best_x.unwrap_or_else(|| vec![0; n]);
    let stats = SolverStats {
        method: "branch_and_bound",
        nodes: s.nodes,
        wall_time: start.elapsed(),
    };
    Ok(PlanSolution::evaluate(inst, x, stats))
}
