//! Pipeline plumbing shared by the `relplan` binary and its tests.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

use relplan_core::model::Feature;
use relplan_core::sweep::DEFAULT_BETAS;
use relplan_core::{
    apply_membership, apply_precedence, load_files, mine, resample, standard_models, sweep, transitive_influence,
    BudgetGrid, EellsMatrix, ErrorKind, FeatureCatalog, InfluenceMatrix, MembershipFunction, PrecedenceMatrix,
    SweepResult,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_GUARD: i32 = 3;
pub const EXIT_CALIBRATION: i32 = 4;

/// Exit status for an error chain, from the first library error found in it.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    let kind = err
        .chain()
        .find_map(|e| e.downcast_ref::<relplan_core::Error>())
        .map(relplan_core::Error::kind);
    match kind {
        Some(ErrorKind::Validation) => EXIT_VALIDATION,
        Some(ErrorKind::Guard) => EXIT_GUARD,
        Some(ErrorKind::Calibration) => EXIT_CALIBRATION,
        _ => EXIT_OTHER,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResampleConfig {
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub membership: MembershipFunction,
    pub beta_list: Vec<f64>,
    pub resample: Option<ResampleConfig>,
    pub transitive: bool,
    pub budget: Option<BudgetGrid>,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            membership: MembershipFunction::Identity,
            beta_list: DEFAULT_BETAS.to_vec(),
            resample: None,
            transitive: false,
            budget: None,
        }
    }
}

impl Config {
    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(relplan_core::Error::from)
            .context("parsing config")
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json_str(&text).with_context(|| format!("in {}", path.display()))
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Aligns `gamma` to `ids` by feature id.
pub fn align_precedence(gamma: &PrecedenceMatrix, ids: &[String]) -> Result<PrecedenceMatrix> {
    let catalog = FeatureCatalog::new(
        ids.iter()
            .map(|id| Feature {
                id: id.clone(),
                name: String::new(),
                cost: 0.0,
                value: 0.0,
            })
            .collect(),
    )?;
    Ok(gamma.aligned_to(&catalog)?)
}

/// Membership, then precedence overrides, then the optional closure.
pub fn build_influence(
    eta: &EellsMatrix,
    membership: &MembershipFunction,
    precedence: Option<&PrecedenceMatrix>,
    transitive: bool,
) -> Result<InfluenceMatrix> {
    let mut d = apply_membership(eta, membership);
    if let Some(gamma) = precedence {
        d = apply_precedence(&d, &align_precedence(gamma, eta.ids())?)?;
    }
    if transitive {
        d = transitive_influence(&d);
    }
    Ok(d)
}

/// Budget grid from the config, defaulting to `1..=⌈Σ c⌉`, with an optional
/// step override.
pub fn budget_points(catalog: &FeatureCatalog, grid: Option<BudgetGrid>, step: Option<f64>) -> Result<Vec<f64>> {
    let mut g = grid.unwrap_or_else(|| BudgetGrid::full(catalog));
    if let Some(s) = step {
        g.step = s;
    }
    g.validate()?;
    Ok(g.points())
}

pub fn write_sweep(result: &SweepResult, csv: &Path, svg: Option<&Path>, meta: Option<&Path>) -> Result<()> {
    write_file(csv, &result.to_csv_string()?)?;
    if let Some(p) = svg {
        write_file(p, &result.to_svg())?;
    }
    if let Some(p) = meta {
        write_file(p, &result.meta_json())?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunInputs {
    pub prefs: PathBuf,
    pub catalog: PathBuf,
    pub precedence: Option<PathBuf>,
}

/// mine → (resample) → membership → precedence → (closure) → sweep, with
/// every intermediate written to `out_dir`.
pub fn end_to_end(inputs: &RunInputs, config: &Config, budget_step: Option<f64>, out_dir: &Path) -> Result<SweepResult> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let bundle = load_files(&inputs.catalog, Some(&inputs.prefs), inputs.precedence.as_deref(), None)
        .context("loading inputs")?;
    let mut prefs = bundle.preferences.expect("preferences were supplied");

    if let Some(rc) = config.resample {
        let (synthetic, report) = resample(&prefs, rc.count, rc.seed).context("resampling")?;
        write_file(&out_dir.join("synthetic.csv"), &synthetic.to_csv_string())?;
        write_file(&out_dir.join("fidelity.json"), &report.to_json_string())?;
        prefs = synthetic;
    }

    let eta = mine(&prefs);
    eta.write(out_dir.join("eells.csv")).context("writing eells.csv")?;

    let gamma = inputs.precedence.is_some().then_some(&bundle.precedence);
    let influence =
        build_influence(&eta, &config.membership, gamma, config.transitive).context("building influence graph")?;
    influence.write(out_dir.join("influence.csv")).context("writing influence.csv")?;

    let budgets = budget_points(&bundle.catalog, config.budget, budget_step)?;
    let models = standard_models(&config.beta_list);
    let result = sweep(&bundle.catalog, &influence, &models, &budgets).context("sweeping budgets")?;
    write_sweep(
        &result,
        &out_dir.join("sweep.csv"),
        Some(&out_dir.join("sweep.svg")),
        Some(&out_dir.join("sweep_meta.json")),
    )?;
    Ok(result)
}
