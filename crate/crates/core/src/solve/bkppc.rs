use std::time::Instant;

use super::{density_order, fractional_bound, Model, PlanSolution, PlanningInstance, SolverStats, TIE};
use crate::error::Result;

const FREE: u8 = 2;

/// Implications from every dependency with `|d| > β`: `x_j ≤ x_k` for
/// positive and `x_j + x_k ≤ 1` for negative strengths.
struct Implications {
    /// Assignments forced by setting feature `j` to 1.
    on_one: Vec<Vec<(usize, u8)>>,
    /// Features forced to 0 by setting feature `k` to 0.
    on_zero: Vec<Vec<usize>>,
}

impl Implications {
    fn new(inst: &PlanningInstance, beta: f64) -> Self {
        let n = inst.len();
        let mut on_one = vec![Vec::new(); n];
        let mut on_zero = vec![Vec::new(); n];
        for j in 0..n {
            for k in 0..n {
                let d = inst.influence().get(j, k);
                if j == k || d.abs() <= beta {
                    continue;
                }
                if d > 0.0 {
                    on_one[j].push((k, 1));
                    on_zero[k].push(j);
                } else {
                    on_one[j].push((k, 0));
                    on_one[k].push((j, 0));
                }
            }
        }
        Self { on_one, on_zero }
    }
}

struct Search<'a> {
    imp: Implications,
    costs: &'a [f64],
    values: &'a [f64],
    order: Vec<usize>,
    assign: Vec<u8>,
    trail: Vec<usize>,
    queue: Vec<(usize, u8)>,
    room: f64,
    value: f64,
    best: f64,
    best_x: Option<Vec<u8>>,
    nodes: u64,
}

impl Search<'_> {
    /// Assigns and propagates; on conflict returns false with partial
    /// assignments left on the trail for [`Self::undo`].
    fn set(&mut self, var: usize, val: u8) -> bool {
        self.queue.clear();
        self.queue.push((var, val));
        while let Some((v, b)) = self.queue.pop() {
            if self.assign[v] != FREE {
                if self.assign[v] != b {
                    return false;
                }
                continue;
            }
            if b == 1 {
                if self.costs[v] > self.room + 1e-9 {
                    return false;
                }
                self.room -= self.costs[v];
                self.value += self.values[v];
                self.assign[v] = 1;
                self.queue.extend_from_slice(&self.imp.on_one[v]);
            } else {
                self.assign[v] = 0;
                self.queue.extend(self.imp.on_zero[v].iter().map(|&j| (j, 0)));
            }
            self.trail.push(v);
        }
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let v = self.trail.pop().expect("trail above mark");
            if self.assign[v] == 1 {
                self.room += self.costs[v];
                self.value -= self.values[v];
            }
            self.assign[v] = FREE;
        }
    }

    fn dfs(&mut self, from: usize) {
        self.nodes += 1;
        let n = self.assign.len();
        let Some(next) = (from..n).find(|&i| self.assign[i] == FREE) else {
            if self.value > self.best + TIE {
                self.best = self.value;
                self.best_x = Some(self.assign.clone());
            }
            return;
        };
        let bound = self.value
            + fractional_bound(
                self.order
                    .iter()
                    .filter(|&&i| self.assign[i] == FREE)
                    .map(|&i| (self.values[i], self.costs[i])),
                self.room,
            );
        if bound + 1e-12 <= self.best + TIE {
            return;
        }
        // Accumulated value drifts under repeated add/subtract; snapshot it.
        let (room, value) = (self.room, self.value);
        for b in [1u8, 0] {
            let mark = self.trail.len();
            if self.set(next, b) {
                self.dfs(next + 1);
            }
            self.undo(mark);
            (self.room, self.value) = (room, value);
        }
    }

    fn greedy(&mut self) -> f64 {
        for k in 0..self.order.len() {
            let i = self.order[k];
            if self.assign[i] != FREE {
                continue;
            }
            let (room, value) = (self.room, self.value);
            let mark = self.trail.len();
            if !self.set(i, 1) {
                self.undo(mark);
                (self.room, self.value) = (room, value);
            }
        }
        let v = self.value;
        self.undo(0);
        v
    }
}

/// Branch-and-bound with unit propagation of the thresholded implications.
pub fn solve_bkp_pc(inst: &PlanningInstance) -> Result<PlanSolution> {
    inst.expect_model("bkppc")?;
    let Model::BkpPc { beta } = inst.model() else { unreachable!() };
    let start = Instant::now();
    let costs = inst.catalog().costs();
    let values = inst.catalog().values();
    let n = costs.len();
    let mut s = Search {
        imp: Implications::new(inst, beta),
        costs: &costs,
        values: &values,
        order: density_order(&values, &costs),
        assign: vec![FREE; n],
        trail: Vec::with_capacity(n),
        queue: Vec::new(),
        room: inst.budget(),
        value: 0.0,
        best: f64::NEG_INFINITY,
        best_x: None,
        nodes: 0,
    };
    s.best = s.greedy() - 2.0 * TIE;
    (s.room, s.value) = (inst.budget(), 0.0);
    s.dfs(0);
    let x = s.best_x.unwrap_or_else(|| vec![0; n]);
    let stats = SolverStats {
        method: "branch_and_bound",
        nodes: s.nodes,
        wall_time: start.elapsed(),
    };
    Ok(PlanSolution::evaluate(inst, x, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solve::solve_bkp;
    use crate::solve::testkit::instance;

    #[test]
    fn positive_dependency_forces_partner() {
        let inst = instance(&[1.0, 1.0], &[10.0, 10.0], &[(0, 1, 1.0)], 1.0, Model::BkpPc { beta: 0.5 });
        let s = solve_bkp_pc(&inst).unwrap();
        assert_eq!(s.x, vec![0, 1]);
        assert_eq!(s.av, 10.0);
        assert_eq!(s.ov, s.av);
    }

    #[test]
    fn negative_dependency_excludes() {
        let inst = instance(&[1.0, 1.0], &[10.0, 10.0], &[(0, 1, -1.0)], 2.0, Model::BkpPc { beta: 0.5 });
        let s = solve_bkp_pc(&inst).unwrap();
        assert_eq!(s.av, 10.0);
        assert_eq!(s.x, vec![1, 0]);
    }

    #[test]
    fn beta_one_matches_bkp() {
        let cells = [(0, 1, 1.0), (1, 2, -1.0), (2, 0, 0.7)];
        let pc = instance(&[2.0, 3.0, 4.0], &[3.0, 4.0, 5.0], &cells, 7.0, Model::BkpPc { beta: 1.0 });
        let plain = pc.with_model(Model::Bkp).unwrap();
        assert_eq!(solve_bkp_pc(&pc).unwrap().x, solve_bkp(&plain).unwrap().x);
    }

    #[test]
    fn contradictions_leave_nothing() {
        // Each feature needs the other, and also excludes it.
        let cells = [(0, 1, 1.0), (1, 0, -1.0), (1, 2, 1.0), (2, 1, -1.0), (2, 0, 1.0), (0, 2, -1.0)];
        let inst = instance(&[1.0; 3], &[5.0; 3], &cells, 3.0, Model::BkpPc { beta: 0.0 });
        let s = solve_bkp_pc(&inst).unwrap();
        assert_eq!(s.x, vec![0, 0, 0]);
    }

    #[test]
    fn residual_penalty_is_reported() {
        let inst = instance(&[1.0, 2.0], &[10.0, 10.0], &[(0, 1, 0.3)], 1.0, Model::BkpPc { beta: 0.5 });
        let s = solve_bkp_pc(&inst).unwrap();
        assert_eq!(s.x, vec![1, 0]);
        assert_eq!(s.ov, s.av);
        assert_eq!(s.residual_penalties.as_ref().unwrap()[0], 0.3);
        assert_eq!(s.ov_full, 7.0);
    }
}
