//! Budget sweeps over several models, with CSV and SVG reports.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureCatalog, InfluenceMatrix};
use crate::solve::{penalties, solve, Model, PlanningInstance};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetGrid {
    pub min: f64,
    pub max: f64,
    #[serde(default = "unit_step")]
    pub step: f64,
}

fn unit_step() -> f64 {
    1.0
}

impl BudgetGrid {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let g = Self { min, max, step };
        g.validate()?;
        Ok(g)
    }

    /// `1, 2, …, ⌈Σ c_i⌉`.
    pub fn full(catalog: &FeatureCatalog) -> Self {
        Self {
            min: 1.0,
            max: catalog.total_cost().ceil().max(1.0),
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite() && self.min >= 0.0 && self.min <= self.max) {
            return Err(Error::Invalid(format!(
                "budget range [{}, {}] is empty or negative",
                self.min, self.max
            )));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::Domain {
                what: "budget step must be positive",
                value: self.step,
            });
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.max - self.min) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|k| self.min + k as f64 * self.step).collect()
    }
}

/// BKP, BKP-PC at each β, then DA-SRP.
pub fn standard_models(betas: &[f64]) -> Vec<Model> {
    let mut v = vec![Model::Bkp];
    v.extend(betas.iter().map(|&beta| Model::BkpPc { beta }));
    v.push(Model::DaSrp);
    v
}

pub const DEFAULT_BETAS: [f64; 4] = [0.0, 0.25, 0.5, 0.75];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub budget: f64,
    pub pct_budget: f64,
    pub model: &'static str,
    pub beta: Option<f64>,
    pub av: f64,
    /// As reported by the model (BKP-PC: thresholded penalties only).
    pub ov: f64,
    /// Against the full influence matrix.
    pub ov_full: f64,
    pub pct_av: f64,
    pub pct_ov: f64,
    pub pct_ov_full: f64,
    pub cost_used: f64,
    pub selection: String,
}

impl SweepRow {
    pub fn model_label(&self) -> String {
        match self.beta {
            Some(b) => format!("{}({b})", self.model),
            None => self.model.to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMeta {
    pub features: usize,
    pub total_cost: f64,
    pub total_value: f64,
    pub ov_denominator: f64,
    pub ov_denominator_convention: &'static str,
    pub models: Vec<String>,
    pub budgets: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub meta: SweepMeta,
    pub rows: Vec<SweepRow>,
}

/// `Σ (1 − p_i) v_i` with every feature selected.
pub fn ov_denominator(catalog: &FeatureCatalog, influence: &InfluenceMatrix) -> f64 {
    let ones = vec![1u8; catalog.len()];
    let p = penalties(influence, &ones);
    catalog.features().iter().zip(p).map(|(f, p)| (1.0 - p) * f.value).sum()
}

/// Solves every `(budget, model)` pair; rows are ordered by budget, then by
/// position in `models`.
pub fn sweep(
    catalog: &FeatureCatalog,
    influence: &InfluenceMatrix,
    models: &[Model],
    budgets: &[f64],
) -> Result<SweepResult> {
    if budgets.is_empty() || models.is_empty() {
        return Err(Error::Invalid("sweep needs at least one budget and one model".into()));
    }
    let base = PlanningInstance::new(catalog.clone(), influence.clone(), budgets[0], models[0])?;
    let total_cost = catalog.total_cost();
    let total_value = catalog.total_value();
    let denom = ov_denominator(catalog, influence);
    let ratio = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };

    let per_budget: Vec<Vec<SweepRow>> = budgets
        .par_iter()
        .map(|&b| {
            models
                .iter()
                .map(|&m| {
                    let inst = base.with_budget(b)?.with_model(m)?;
                    let s = solve(&inst).map_err(|e| e.in_stage(format!("solving {m} at budget {b}")))?;
                    Ok(SweepRow {
                        budget: b,
                        pct_budget: ratio(b, total_cost),
                        model: m.tag(),
                        beta: m.beta(),
                        av: s.av,
                        ov: s.ov,
                        ov_full: s.ov_full,
                        pct_av: ratio(s.av, total_value),
                        pct_ov: ratio(s.ov, denom),
                        pct_ov_full: ratio(s.ov_full, denom),
                        cost_used: s.cost_used,
                        selection: s.selection_bits(),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        meta: SweepMeta {
            features: catalog.len(),
            total_cost,
            total_value,
            ov_denominator: denom,
            ov_denominator_convention: "sum of (1 - p_i) v_i with every feature selected",
            models: models.iter().map(Model::to_string).collect(),
            budgets: budgets.len(),
        },
        rows: per_budget.into_iter().flatten().collect(),
    })
}

impl SweepResult {
    pub fn to_csv_string(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Invalid(format!("csv buffer: {e}")))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn meta_json(&self) -> String {
        serde_json::to_string_pretty(&self.meta).expect("meta serializes")
    }

    /// Rows of one model variant in budget order.
    pub fn series(&self, model: &str, beta: Option<f64>) -> impl Iterator<Item = &SweepRow> + '_ {
        let model = model.to_owned();
        self.rows.iter().filter(move |r| r.model == model && r.beta == beta)
    }

    /// Line chart of %AV (solid) and %OV (dashed) against %budget, one
    /// colour per model variant.
    pub fn to_svg(&self) -> String {
        const W: f64 = 960.0;
        const H: f64 = 540.0;
        const PAD_L: f64 = 70.0;
        const PAD_R: f64 = 200.0;
        const PAD_T: f64 = 30.0;
        const PAD_B: f64 = 60.0;
        const COLOURS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

        let y_max = self
            .rows
            .iter()
            .flat_map(|r| [r.pct_av, r.pct_ov])
            .fold(1.0f64, f64::max);
        let px = |x: f64| PAD_L + x * (W - PAD_L - PAD_R);
        let py = |y: f64| H - PAD_B - (y / y_max) * (H - PAD_T - PAD_B);

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {W} {H}" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
        for k in 0..=10 {
            let t = k as f64 / 10.0;
            let (x, y) = (px(t), py(t * y_max));
            let _ = writeln!(
                s,
                r##"<line x1="{x:.1}" y1="{:.1}" x2="{x:.1}" y2="{:.1}" stroke="#eee"/><line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#eee"/>"##,
                PAD_T,
                H - PAD_B,
                PAD_L,
                W - PAD_R
            );
            let _ = writeln!(
                s,
                r#"<text x="{x:.1}" y="{:.1}" text-anchor="middle">{:.0}%</text><text x="{:.1}" y="{:.1}" text-anchor="end">{:.0}%</text>"#,
                H - PAD_B + 18.0,
                t * 100.0,
                PAD_L - 6.0,
                y + 4.0,
                t * y_max * 100.0
            );
        }
        let _ = writeln!(
            s,
            r##"<rect x="{PAD_L}" y="{PAD_T}" width="{:.1}" height="{:.1}" fill="none" stroke="#333"/>"##,
            W - PAD_L - PAD_R,
            H - PAD_T - PAD_B
        );
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">budget (% of total cost)</text>"#,
            px(0.5),
            H - 15.0
        );

        let mut variants: Vec<(&'static str, Option<f64>)> = Vec::new();
        for r in &self.rows {
            if !variants.iter().any(|v| v.0 == r.model && v.1 == r.beta) {
                variants.push((r.model, r.beta));
            }
        }
        for (k, &(model, beta)) in variants.iter().enumerate() {
            let colour = COLOURS[k % COLOURS.len()];
            let rows: Vec<&SweepRow> = self.series(model, beta).collect();
            for (metric, dash) in [("AV", ""), ("OV", r#" stroke-dasharray="6 4""#)] {
                let pts: Vec<String> = rows
                    .iter()
                    .map(|r| {
                        let y = if metric == "AV" { r.pct_av } else { r.pct_ov };
                        format!("{:.2},{:.2}", px(r.pct_budget.min(1.0)), py(y))
                    })
                    .collect();
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5"{dash} points="{}"/>"#,
                    pts.join(" ")
                );
            }
            let label = rows.first().map(|r| r.model_label()).unwrap_or_default();
            let ly = PAD_T + 10.0 + 36.0 * k as f64;
            let lx = W - PAD_R + 15.0;
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{}" y="{}">{label} %AV</text>"#,
                lx + 25.0,
                lx + 30.0,
                ly + 4.0
            );
            let _ = writeln!(
                s,
                r#"<line x1="{lx}" y1="{}" x2="{}" y2="{}" stroke="{colour}" stroke-width="2" stroke-dasharray="6 4"/><text x="{}" y="{}">{label} %OV</text>"#,
                ly + 16.0,
                lx + 25.0,
                ly + 16.0,
                lx + 30.0,
                ly + 20.0
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{pms2_catalog, pms2_influence};

    #[test]
    fn grid_points() {
        assert_eq!(BudgetGrid::new(0.0, 10.0, 1.0).unwrap().points().len(), 11);
        assert_eq!(BudgetGrid::new(1.0, 2.0, 0.5).unwrap().points(), vec![1.0, 1.5, 2.0]);
        assert!(BudgetGrid::new(3.0, 2.0, 1.0).is_err());
        assert!(BudgetGrid::new(0.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn zero_budget_takes_free_features_only() {
        let cat = pms2_catalog();
        let d = pms2_influence();
        let r = sweep(&cat, &d, &[Model::Bkp], &[0.0]).unwrap();
        // f3 and f26 cost nothing; f26 has no value.
        assert_eq!(r.rows[0].av, 4.0);
    }

    #[test]
    fn rows_are_ordered_and_rendered() {
        let cat = pms2_catalog();
        let d = pms2_influence();
        let models = standard_models(&DEFAULT_BETAS);
        let r = sweep(&cat, &d, &models, &[10.0, 20.0, 30.0]).unwrap();
        assert_eq!(r.rows.len(), 18);
        assert_eq!(r.rows[0].model, "bkp");
        assert_eq!(r.rows[5].model, "dasrp");
        assert_eq!(r.rows[6].budget, 20.0);
        let csv = r.to_csv_string().unwrap();
        assert!(csv.starts_with("budget,pct_budget,model,beta,av,ov,ov_full"));
        assert_eq!(csv.lines().count(), 19);
        let svg = r.to_svg();
        assert!(svg.contains(r#"viewBox="0 0 960 540""#));
        assert_eq!(svg.matches("<polyline").count(), 12);
    }
}
