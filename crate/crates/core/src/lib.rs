//! Feature-release planning under value dependencies mined from user
//! preferences.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`mining`] turns a binary preference matrix into signed causal
//!    strengths.
//! 2. [`fdg`] maps those strengths through a membership function and applies
//!    stakeholder precedence overrides.
//! 3. [`solve`] picks features under a budget with one of three exact
//!    models.
//! 4. [`sweep`] repeats step 3 over a budget grid and reports the results.
//!
//! [`resample`] can enlarge a small survey before mining, and [`numerics`]
//! holds the statistical primitives behind it.

pub mod datasets;
pub mod error;
pub mod fdg;
pub mod grid;
pub mod mining;
pub mod model;
pub mod numerics;
pub mod resample;
pub mod solve;
pub mod sweep;

pub use error::{Error, ErrorKind, Result};
pub use fdg::{apply_membership, apply_precedence, transitive_influence, MembershipFunction};
pub use grid::Grid;
pub use mining::{count_cooccurrence, eells_matrix, mine, CountMatrix, EellsMatrix};
pub use model::{
    aggregate_estimates, load_and_validate, load_files, EstimateSheet, Feature, FeatureCatalog, InfluenceMatrix,
    InstanceBundle, InstanceSources, PrecedenceMatrix, PreferenceMatrix,
};
pub use resample::{
    calibrate_latent, estimate_moments, generate, resample, validate_moments, DichotomizedGaussianModel,
    FidelityReport, MomentTargets,
};
pub use solve::{
    brute_force, overall_value, penalties, solve, solve_bkp, solve_bkp_pc, solve_dasrp, Model, PlanSolution,
    PlanningInstance,
};
pub use sweep::{standard_models, sweep, BudgetGrid, SweepResult, SweepRow};
