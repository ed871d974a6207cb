use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use relplan_cli::{
    budget_points, build_influence, end_to_end, exit_code, write_file, write_sweep, Config, ResampleConfig,
    RunInputs,
};
use relplan_core::solve::{solve, Model, PlanningInstance};
use relplan_core::sweep::standard_models;
use relplan_core::{resample, sweep, BudgetGrid, EellsMatrix, FeatureCatalog, InfluenceMatrix, PrecedenceMatrix, PreferenceMatrix};

#[derive(Parser, Debug)]
#[command(name = "relplan", version, about = "Dependency-aware release planning")]
struct Cli {
    /// Directory for outputs given without an explicit path.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,

    /// Seed for resampling; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine signed causal strengths from a preference matrix.
    Mine {
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a larger synthetic survey with matching first and second moments.
    Resample {
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fidelity report (JSON).
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Turn strengths into an influence matrix.
    Graph {
        #[arg(long)]
        eells: PathBuf,
        /// identity | tl:LO:HI | concave:P | sc:LO:HI
        #[arg(long)]
        membership: Option<String>,
        #[arg(long)]
        precedence: Option<PathBuf>,
        #[arg(long)]
        transitive: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve one planning instance.
    Plan {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        influence: PathBuf,
        /// bkp | bkppc | dasrp
        #[arg(long)]
        model: String,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        budget: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include wall time in the output (makes it non-deterministic).
        #[arg(long)]
        timing: bool,
    },
    /// Solve every model over a budget grid.
    Sweep {
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        influence: PathBuf,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Comma-separated BKP-PC thresholds.
        #[arg(long, value_delimiter = ',')]
        betas: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Mine, build the graph and sweep in one go.
    Run {
        #[arg(long)]
        prefs: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
        #[arg(long)]
        precedence: Option<PathBuf>,
        #[arg(long)]
        membership: Option<String>,
        #[arg(long)]
        resample_count: Option<usize>,
        #[arg(long)]
        transitive: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long)]
    budget_min: Option<f64>,
    #[arg(long)]
    budget_max: Option<f64>,
    #[arg(long)]
    budget_step: Option<f64>,
}

impl BudgetArgs {
    fn grid(&self, base: Option<BudgetGrid>, catalog: &FeatureCatalog) -> Option<BudgetGrid> {
        if self.budget_min.is_none() && self.budget_max.is_none() {
            return base;
        }
        let g = base.unwrap_or_else(|| BudgetGrid::full(catalog));
        Some(BudgetGrid {
            min: self.budget_min.unwrap_or(g.min),
            max: self.budget_max.unwrap_or(g.max),
            step: g.step,
        })
    }
}

fn output(cli: &Cli, given: &Option<PathBuf>, default: &str) -> PathBuf {
    given.clone().unwrap_or_else(|| cli.out_dir.join(default))
}

fn membership(given: &Option<String>, config: &Config) -> Result<relplan_core::MembershipFunction> {
    match given {
        Some(s) => Ok(s.parse()?),
        None => Ok(config.membership),
    }
}

fn load_catalog(path: &Path) -> Result<FeatureCatalog> {
    FeatureCatalog::read(path).with_context(|| format!("loading {}", path.display()))
}

fn load_influence(path: &Path, catalog: &FeatureCatalog) -> Result<InfluenceMatrix> {
    Ok(InfluenceMatrix::read(path)
        .and_then(|m| m.aligned_to(catalog))
        .with_context(|| format!("loading {}", path.display()))?)
}

fn run(cli: &Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(p) => Config::read(p)?,
        None => Config::default(),
    };
    match &cli.command {
        Command::Mine { prefs, out } => {
            let m = PreferenceMatrix::read(prefs).with_context(|| format!("loading {}", prefs.display()))?;
            let eta = relplan_core::mine(&m);
            for &j in eta.never_selected() {
                eprintln!("note: {} is never selected", eta.ids()[j]);
            }
            for &j in eta.always_selected() {
                eprintln!("note: {} is always selected", eta.ids()[j]);
            }
            let path = output(cli, out, "eells.csv");
            write_file(&path, &eta.to_csv_string())?;
        }
        Command::Resample { prefs, count, out, report } => {
            let m = PreferenceMatrix::read(prefs).with_context(|| format!("loading {}", prefs.display()))?;
            let seed = cli.seed.or(config.resample.map(|r| r.seed)).unwrap_or(0);
            let (synthetic, fidelity) = resample(&m, *count, seed).context("resampling")?;
            write_file(&output(cli, out, "synthetic.csv"), &synthetic.to_csv_string())?;
            if fidelity.clamped_pairs > 0 {
                eprintln!("warning: {} pair targets were clamped", fidelity.clamped_pairs);
            }
            if let Some(p) = report {
                write_file(p, &fidelity.to_json_string())?;
            }
        }
        Command::Graph {
            eells,
            membership: g,
            precedence,
            transitive,
            out,
        } => {
            let eta = EellsMatrix::read(eells).with_context(|| format!("loading {}", eells.display()))?;
            let gamma = precedence
                .as_ref()
                .map(|p| PrecedenceMatrix::read(p).with_context(|| format!("loading {}", p.display())))
                .transpose()?;
            let d = build_influence(&eta, &membership(g, &config)?, gamma.as_ref(), *transitive || config.transitive)?;
            write_file(&output(cli, out, "influence.csv"), &d.to_csv_string())?;
        }
        Command::Plan {
            catalog,
            influence,
            model,
            beta,
            budget,
            out,
            timing,
        } => {
            let cat = load_catalog(catalog)?;
            let d = load_influence(influence, &cat)?;
            let inst = PlanningInstance::new(cat, d, *budget, Model::parse(model, *beta)?)?;
            let sol = solve(&inst)?;
            let mut json = serde_json::to_value(&sol)?;
            if *timing {
                json["stats"]["wall_time_ms"] = serde_json::json!(sol.stats.wall_time.as_secs_f64() * 1e3);
            }
            write_file(&output(cli, out, "plan.json"), &serde_json::to_string_pretty(&json)?)?;
        }
        Command::Sweep {
            catalog,
            influence,
            budget,
            betas,
            out,
            svg,
        } => {
            let cat = load_catalog(catalog)?;
            let d = load_influence(influence, &cat)?;
            let budgets = budget_points(&cat, budget.grid(config.budget, &cat), budget.budget_step)?;
            let models = standard_models(betas.as_deref().unwrap_or(&config.beta_list));
            let result = sweep(&cat, &d, &models, &budgets)?;
            let csv = output(cli, out, "sweep.csv");
            let meta = csv.with_extension("meta.json");
            write_sweep(&result, &csv, svg.as_deref(), Some(&meta))?;
        }
        Command::Run {
            prefs,
            catalog,
            precedence,
            membership: g,
            resample_count,
            transitive,
            budget,
        } => {
            config.membership = membership(g, &config)?;
            config.transitive |= *transitive;
            if let Some(count) = *resample_count {
                config.resample = Some(ResampleConfig {
                    count,
                    seed: config.resample.map_or(0, |r| r.seed),
                });
            }
            if let (Some(seed), Some(rc)) = (cli.seed, config.resample.as_mut()) {
                rc.seed = seed;
            }
            let cat = load_catalog(catalog)?;
            config.budget = budget.grid(config.budget, &cat);
            let inputs = RunInputs {
                prefs: prefs.clone(),
                catalog: catalog.clone(),
                precedence: precedence.clone(),
            };
            end_to_end(&inputs, &config, budget.budget_step, &cli.out_dir)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
