//! Domain types, file ingestion and stakeholder-estimate aggregation.
//!
//! Preference matrices are stored feature-major: row `i` is feature `i` of
//! the catalog, column `u` is user `u`.

mod catalog;
pub(crate) mod csvio;
mod estimates;
mod matrices;

use std::path::Path;

pub use catalog::{Feature, FeatureCatalog};
pub use estimates::{aggregate_estimates, median, EstimateSheet, FeatureEstimates};
pub use matrices::{InfluenceMatrix, PrecedenceMatrix, PreferenceMatrix};
pub(crate) use matrices::{check_signed_entries, parse_signed_square};

use crate::error::Result;

/// Raw text of each input file. Only the catalog is mandatory.
#[derive(Debug, Clone, Copy, Default)]
pub struct InstanceSources<'a> {
    pub catalog: &'a str,
    pub preferences: Option<&'a str>,
    pub precedence: Option<&'a str>,
    pub influence: Option<&'a str>,
}

/// Catalog plus whichever matrices were supplied, all aligned to catalog
/// order.
#[derive(Debug, Clone)]
pub struct InstanceBundle {
    pub catalog: FeatureCatalog,
    pub preferences: Option<PreferenceMatrix>,
    pub precedence: PrecedenceMatrix,
    pub influence: Option<InfluenceMatrix>,
}

pub fn load_and_validate(src: InstanceSources<'_>) -> Result<InstanceBundle> {
    let catalog = FeatureCatalog::from_json_str(src.catalog)?;
    let preferences = src
        .preferences
        .map(|t| PreferenceMatrix::from_csv_str(t)?.aligned_to(&catalog))
        .transpose()?;
    let precedence = match src.precedence {
        Some(t) => PrecedenceMatrix::from_csv_str(t)?.aligned_to(&catalog)?,
        None => PrecedenceMatrix::zeros(catalog.ids()),
    };
    let influence = src
        .influence
        .map(|t| InfluenceMatrix::from_csv_str(t)?.aligned_to(&catalog))
        .transpose()?;
    Ok(InstanceBundle {
        catalog,
        preferences,
        precedence,
        influence,
    })
}

/// File-path flavour of [`load_and_validate`].
pub fn load_files(
    catalog: &Path,
    preferences: Option<&Path>,
    precedence: Option<&Path>,
    influence: Option<&Path>,
) -> Result<InstanceBundle> {
    let catalog = csvio::read_text(catalog)?;
    let read = |p: Option<&Path>| p.map(csvio::read_text).transpose();
    let (preferences, precedence, influence) = (read(preferences)?, read(precedence)?, read(influence)?);
    load_and_validate(InstanceSources {
        catalog: &catalog,
        preferences: preferences.as_deref(),
        precedence: precedence.as_deref(),
        influence: influence.as_deref(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    fn catalog_json(n: usize) -> String {
        let items: Vec<String> = (1..=n)
            .map(|i| format!(r#"{{"id":"f{i}","name":"feature {i}","cost":{i},"value":{}}}"#, 2 * i))
            .collect();
        format!("[{}]", items.join(","))
    }

    fn prefs_csv(n: usize, k: usize) -> String {
        let mut s = String::from("feature");
        for u in 1..=k {
            s.push_str(&format!(",u{u}"));
        }
        s.push('\n');
        for i in 1..=n {
            s.push_str(&format!("f{i}"));
            for u in 1..=k {
                s.push_str(if (i * 7 + u * 3) % 5 < 2 { ",1" } else { ",0" });
            }
            s.push('\n');
        }
        s
    }

    #[test]
    fn accepts_four_by_twenty() {
        let cat = catalog_json(4);
        let prefs = prefs_csv(4, 20);
        let b = load_and_validate(InstanceSources {
            catalog: &cat,
            preferences: Some(&prefs),
            ..Default::default()
        })
        .unwrap();
        let p = b.preferences.unwrap();
        assert_eq!((p.n_features(), p.n_users()), (4, 20));
        assert_eq!(b.precedence.dim(), 4);
    }

    #[test]
    fn rejects_five_by_twenty_for_four_features() {
        let cat = catalog_json(4);
        let prefs = prefs_csv(5, 20);
        let err = load_and_validate(InstanceSources {
            catalog: &cat,
            preferences: Some(&prefs),
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::Dimension { expected: 4, found: 5, .. }), "{err}");
    }

    #[test]
    fn influence_out_of_range_reports_cell() {
        let cat = catalog_json(2);
        let infl = "feature,f1,f2\nf1,1,0.5\nf2,1.3,1\n";
        let err = load_and_validate(InstanceSources {
            catalog: &cat,
            influence: Some(infl),
            ..Default::default()
        })
        .unwrap_err();
        assert!(matches!(err, Error::InvalidEntry { row: 2, col: 1, .. }), "{err}");
        assert!(err.to_string().contains("row 2, column 1"));
    }
}
