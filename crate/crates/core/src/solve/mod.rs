//! Exact selection under a budget for three planning programs:
//!
//! * `Bkp` maximises accumulated value `AV = Σ v_i x_i`;
//! * `BkpPc(β)` maximises AV subject to hard implications drawn from every
//!   dependency stronger than `β`;
//! * `DaSrp` maximises overall value `OV = Σ x_i (1 − p_i) v_i`, where `p_i`
//!   is the strongest ignored-positive or selected-negative dependency of
//!   feature `i`.
//!
//! Among optimal selections every solver returns the lexicographically
//! largest, so affordable features are kept whenever they cost nothing in
//! objective.

mod bkp;
mod bkppc;
mod brute;
mod dasrp;
mod value;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureCatalog, InfluenceMatrix};

pub use bkp::{solve_bkp, solve_bkp_bnb, solve_bkp_dp};
pub use bkppc::solve_bkp_pc;
pub use brute::{brute_force, BRUTE_FORCE_MAX_FEATURES};
pub use dasrp::solve_dasrp;
pub use value::{overall_value, penalties, penalties_where};

/// Objectives closer than this are treated as equal.
pub const TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    Bkp,
    BkpPc { beta: f64 },
    DaSrp,
}

impl Model {
    pub fn tag(&self) -> &'static str {
        match self {
            Model::Bkp => "bkp",
            Model::BkpPc { .. } => "bkppc",
            Model::DaSrp => "dasrp",
        }
    }

    pub fn beta(&self) -> Option<f64> {
        match *self {
            Model::BkpPc { beta } => Some(beta),
            _ => None,
        }
    }

    /// `bkp`, `dasrp`, `bkppc` (needs `beta`).
    pub fn parse(tag: &str, beta: Option<f64>) -> Result<Self> {
        match (tag, beta) {
            ("bkp", _) => Ok(Model::Bkp),
            ("dasrp", _) => Ok(Model::DaSrp),
            ("bkppc", Some(beta)) => Ok(Model::BkpPc { beta }),
            ("bkppc", None) => Err(Error::Invalid("model bkppc needs a beta".into())),
            _ => Err(Error::Invalid(format!("unknown model `{tag}`"))),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Model::BkpPc { beta } => write!(f, "bkppc({beta})"),
            m => f.write_str(m.tag()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PlanningInstance {
    catalog: FeatureCatalog,
    influence: InfluenceMatrix,
    budget: f64,
    model: Model,
}

impl PlanningInstance {
    pub fn new(catalog: FeatureCatalog, influence: InfluenceMatrix, budget: f64, model: Model) -> Result<Self> {
        if !(budget.is_finite() && budget >= 0.0) {
            return Err(Error::Domain {
                what: "budget must be finite and non-negative",
                value: budget,
            });
        }
        if let Model::BkpPc { beta } = model {
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::Domain {
                    what: "beta must lie in [0, 1]",
                    value: beta,
                });
            }
        }
        if influence.dim() != catalog.len() {
            return Err(Error::Dimension {
                what: "influence matrix vs catalog".into(),
                expected: catalog.len(),
                found: influence.dim(),
            });
        }
        Ok(Self {
            catalog,
            influence,
            budget,
            model,
        })
    }

    pub fn catalog(&self) -> &FeatureCatalog {
        &self.catalog
    }

    pub fn influence(&self) -> &InfluenceMatrix {
        &self.influence
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.catalog.len()
    }

    pub fn is_empty(&self) -> bool {
        self.catalog.is_empty()
    }

    pub fn with_budget(&self, budget: f64) -> Result<Self> {
        Self::new(self.catalog.clone(), self.influence.clone(), budget, self.model)
    }

    pub fn with_model(&self, model: Model) -> Result<Self> {
        Self::new(self.catalog.clone(), self.influence.clone(), self.budget, model)
    }

    fn expect_model(&self, want: &'static str) -> Result<()> {
        if self.model.tag() == want {
            Ok(())
        } else {
            Err(Error::Contract(format!(
                "{want} solver called on a {} instance",
                self.model
            )))
        }
    }

    /// True when `x` fits the budget and, for BKP-PC, every thresholded
    /// implication.
    pub fn is_feasible(&self, x: &[u8]) -> bool {
        let cost: f64 = self.catalog.features().iter().zip(x).map(|(f, &s)| f.cost * s as f64).sum();
        if cost > self.budget + 1e-9 {
            return false;
        }
        let Model::BkpPc { beta } = self.model else {
            return true;
        };
        let n = self.len();
        for j in 0..n {
            for k in 0..n {
                let d = self.influence.get(j, k);
                if j == k || d.abs() <= beta || x[j] == 0 {
                    continue;
                }
                if (d > 0.0 && x[k] == 0) || (d < 0.0 && x[k] == 1) {
                    return false;
                }
            }
        }
        true
    }

    /// OV for DA-SRP, AV otherwise.
    pub fn objective(&self, x: &[u8]) -> f64 {
        let (av, ov) = overall_value(&self.catalog, &self.influence, x);
        match self.model {
            Model::DaSrp => ov,
            _ => av,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub method: &'static str,
    pub nodes: u64,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanSolution {
    #[serde(flatten)]
    pub model: Model,
    pub budget: f64,
    pub x: Vec<u8>,
    /// As reported by the model: BKP-PC counts only dependencies above β.
    #[serde(rename = "p")]
    pub penalties: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(rename = "AV")]
    pub av: f64,
    #[serde(rename = "OV")]
    pub ov: f64,
    /// OV of `x` against the full influence matrix.
    #[serde(rename = "OV_full")]
    pub ov_full: f64,
    /// BKP-PC only: penalties from dependencies at or below β.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_penalties: Option<Vec<f64>>,
    pub cost_used: f64,
    pub stats: SolverStats,
}

impl PlanSolution {
    /// Assembles the reported quantities for a selection.
    pub fn evaluate(inst: &PlanningInstance, x: Vec<u8>, stats: SolverStats) -> Self {
        let d = inst.influence();
        let full = penalties(d, &x);
        let (reported, residual) = match inst.model() {
            Model::BkpPc { beta } => (
                penalties_where(d, &x, |v| v.abs() > beta),
                Some(penalties_where(d, &x, |v| v.abs() <= beta)),
            ),
            _ => (full.clone(), None),
        };
        let values = inst.catalog().values();
        let (mut av, mut ov, mut ov_full) = (0.0, 0.0, 0.0);
        for i in 0..x.len() {
            if x[i] == 1 {
                av += values[i];
                ov += (1.0 - reported[i]) * values[i];
                ov_full += (1.0 - full[i]) * values[i];
            }
        }
        let cost_used = inst
            .catalog()
            .features()
            .iter()
            .zip(&x)
            .map(|(f, &s)| f.cost * s as f64)
            .sum();
        Self {
            model: inst.model(),
            budget: inst.budget(),
            phi: reported.iter().map(|p| 1.0 - p).collect(),
            penalties: reported,
            x,
            av,
            ov,
            ov_full,
            residual_penalties: residual,
            cost_used,
            stats,
        }
    }

    /// The quantity the model maximises.
    pub fn objective(&self) -> f64 {
        match self.model {
            Model::DaSrp => self.ov,
            _ => self.av,
        }
    }

    /// `x` as a string of 0/1 characters.
    pub fn selection_bits(&self) -> String {
        self.x.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    }
}

/// Dispatches on the instance's model.
pub fn solve(inst: &PlanningInstance) -> Result<PlanSolution> {
    match inst.model() {
        Model::Bkp => solve_bkp(inst),
        Model::BkpPc { .. } => solve_bkp_pc(inst),
        Model::DaSrp => solve_dasrp(inst),
    }
}

/// Upper bound on `Σ w_i` over a subset of `items` (`(weight, cost)`)
/// fitting `capacity`, with the last item taken fractionally. `items` must
/// be sorted by decreasing `w/c`, zero-cost items first.
pub(crate) fn fractional_bound(items: impl Iterator<Item = (f64, f64)>, capacity: f64) -> f64 {
    let mut room = capacity;
    let mut total = 0.0;
    for (w, c) in items {
        if w <= 0.0 {
            continue;
        }
        if c <= room {
            room -= c;
            total += w;
        } else {
            total += w * room / c;
            break;
        }
    }
    total
}

/// Item indices ordered by decreasing `w/c`; zero costs count as infinite
/// density, ties broken by index.
pub(crate) fn density_order(weights: &[f64], costs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    sort_by_density(&mut idx, weights, costs);
    idx
}

pub(crate) fn sort_by_density(idx: &mut [usize], weights: &[f64], costs: &[f64]) {
    let density = |i: usize| {
        if costs[i] <= 0.0 {
            f64::INFINITY
        } else {
            weights[i] / costs[i]
        }
    };
    idx.sort_by(|&a, &b| density(b).total_cmp(&density(a)).then(a.cmp(&b)));
}

#[cfg(test)]
pub(crate) mod testkit {
    use super::*;
    use crate::grid::Grid;
    use crate::numerics::SeededRng;

    pub fn instance(costs: &[f64], values: &[f64], cells: &[(usize, usize, f64)], budget: f64, model: Model) -> PlanningInstance {
        let n = costs.len();
        let mut g = Grid::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
        for &(i, j, v) in cells {
            g[(i, j)] = v;
        }
        PlanningInstance::new(
            FeatureCatalog::from_costs_values(costs, values).unwrap(),
            InfluenceMatrix::from_grid(g).unwrap(),
            budget,
            model,
        )
        .unwrap()
    }

    /// Integer costs and values in 0..=20, dense influence in [−1, 1]
    /// rounded to two decimals.
    pub fn random_instance(rng: &mut SeededRng, n: usize, model: Model) -> PlanningInstance {
        let costs: Vec<f64> = (0..n).map(|_| rng.below(21) as f64).collect();
        let values: Vec<f64> = (0..n).map(|_| rng.below(21) as f64).collect();
        let g = Grid::from_fn(n, n, |_, _| (rng.range_f64(-1.0, 1.0) * 100.0).round() / 100.0);
        let total: f64 = costs.iter().sum();
        let budget = (rng.uniform() * total).round();
        PlanningInstance::new(
            FeatureCatalog::from_costs_values(&costs, &values).unwrap(),
            InfluenceMatrix::from_grid(g).unwrap(),
            budget,
            model,
        )
        .unwrap()
    }
}
