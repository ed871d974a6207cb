use std::path::Path;

use serde::{Deserialize, Serialize};

use super::catalog::{Feature, FeatureCatalog};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureEstimates {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub cost_estimates: Vec<f64>,
    pub value_estimates: Vec<f64>,
}

/// Raw per-stakeholder cost and value estimates, one entry per feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EstimateSheet {
    pub features: Vec<FeatureEstimates>,
}

impl EstimateSheet {
    pub fn validate(&self) -> Result<()> {
        if self.features.is_empty() {
            return Err(Error::Invalid("estimate sheet is empty".into()));
        }
        for f in &self.features {
            for (what, list) in [("cost", &f.cost_estimates), ("value", &f.value_estimates)] {
                if list.is_empty() {
                    return Err(Error::Invalid(format!(
                        "feature `{}` has no {what} estimates",
                        f.id
                    )));
                }
                if let Some(bad) = list.iter().find(|v| !v.is_finite() || **v < 0.0) {
                    return Err(Error::Invalid(format!(
                        "feature `{}` has invalid {what} estimate {bad}",
                        f.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let sheet: Self = serde_json::from_str(s)?;
        sheet.validate()?;
        Ok(sheet)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }
}

/// Median; even-length lists average the two central elements.
pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn rescale(medians: &[f64], scale_max: f64, what: &'static str) -> Result<Vec<f64>> {
    let max = medians.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(Error::DegenerateScale(what));
    }
    let factor = scale_max / max;
    Ok(medians
        .iter()
        .map(|&m| if m == max { scale_max } else { m * factor })
        .collect())
}

/// Per feature median of the stakeholder estimates, linearly rescaled so the
/// largest median maps to `scale_max` (costs and values independently).
pub fn aggregate_estimates(sheet: &EstimateSheet, scale_max: f64) -> Result<FeatureCatalog> {
    if !(scale_max.is_finite() && scale_max > 0.0) {
        return Err(Error::Domain {
            what: "scale_max must be positive",
            value: scale_max,
        });
    }
    sheet.validate()?;
    let cost_medians: Vec<f64> = sheet.features.iter().map(|f| median(&f.cost_estimates)).collect();
    let value_medians: Vec<f64> = sheet.features.iter().map(|f| median(&f.value_estimates)).collect();
    let costs = rescale(&cost_medians, scale_max, "cost")?;
    let values = rescale(&value_medians, scale_max, "value")?;
    FeatureCatalog::new(
        sheet
            .features
            .iter()
            .zip(costs.into_iter().zip(values))
            .map(|(f, (cost, value))| Feature {
                id: f.id.clone(),
                name: f.name.clone(),
                cost,
                value,
            })
            .collect(),
    )
}
