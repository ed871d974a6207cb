use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub id: String,
    #[serde(default)]
    pub name: String,
    pub cost: f64,
    pub value: f64,
}

/// Ordered feature list; the order fixes the row index of every matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureCatalog {
    features: Vec<Feature>,
    index: HashMap<String, usize>,
}

impl FeatureCatalog {
    pub fn new(features: Vec<Feature>) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Invalid("feature catalog is empty".into()));
        }
        let mut index = HashMap::with_capacity(features.len());
        for (i, f) in features.iter().enumerate() {
            if f.id.trim().is_empty() {
                return Err(Error::Invalid(format!("feature {i} has an empty id")));
            }
            if index.insert(f.id.clone(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate feature id `{}`", f.id)));
            }
            for (what, v) in [("cost", f.cost), ("value", f.value)] {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Invalid(format!(
                        "feature `{}` has invalid {what} {v}",
                        f.id
                    )));
                }
            }
        }
        Ok(Self { features, index })
    }

    /// Builds a catalog with ids `f1..fn` from cost and value vectors.
    pub fn from_costs_values(costs: &[f64], values: &[f64]) -> Result<Self> {
        if costs.len() != values.len() {
            return Err(Error::Dimension {
                what: "cost/value vectors".into(),
                expected: costs.len(),
                found: values.len(),
            });
        }
        Self::new(
            costs
                .iter()
                .zip(values)
                .enumerate()
                .map(|(i, (&cost, &value))| Feature {
                    id: format!("f{}", i + 1),
                    name: String::new(),
                    cost,
                    value,
                })
                .collect(),
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let features: Vec<Feature> = serde_json::from_str(s)?;
        Self::new(features)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.features).expect("catalog serialises")
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn ids(&self) -> Vec<String> {
        self.features.iter().map(|f| f.id.clone()).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn costs(&self) -> Vec<f64> {
        self.features.iter().map(|f| f.cost).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.features.iter().map(|f| f.value).collect()
    }

    pub fn total_cost(&self) -> f64 {
        self.features.iter().map(|f| f.cost).sum()
    }

    pub fn total_value(&self) -> f64 {
        self.features.iter().map(|f| f.value).sum()
    }
}
