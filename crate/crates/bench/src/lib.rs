//! Benchmark fixtures.

use relplan_core::datasets::{pms2_catalog, pms2_influence};
use relplan_core::numerics::SeededRng;
use relplan_core::{estimate_moments, Grid, Model, MomentTargets, PlanningInstance, PreferenceMatrix};

/// The PMS-II planning instance at `budget`.
pub fn pms2(budget: f64, model: Model) -> PlanningInstance {
    PlanningInstance::new(pms2_catalog(), pms2_influence(), budget, model).expect("bundled data is valid")
}

/// Moment targets of a random correlated survey.
pub fn survey_targets(features: usize, users: usize, seed: u64) -> MomentTargets {
    let mut rng = SeededRng::new(seed);
    let base: Vec<f64> = (0..features).map(|_| rng.range_f64(0.2, 0.8)).collect();
    let mut g = Grid::filled(features, users, 0u8);
    for u in 0..users {
        let f = rng.range_f64(-0.15, 0.15);
        for (i, &b) in base.iter().enumerate() {
            g[(i, u)] = rng.bernoulli(b + f) as u8;
        }
    }
    estimate_moments(&PreferenceMatrix::from_grid(g).expect("non-empty"))
}
