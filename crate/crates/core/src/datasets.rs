//! Bundled PMS-II instance: 27 features with aggregated costs and values
//! and the published signed influence matrix.

use crate::model::{FeatureCatalog, InfluenceMatrix};

pub const PMS2_CATALOG_JSON: &str = include_str!("../data/pms2/catalog.json");
pub const PMS2_INFLUENCE_CSV: &str = include_str!("../data/pms2/influence.csv");

pub fn pms2_catalog() -> FeatureCatalog {
    FeatureCatalog::from_json_str(PMS2_CATALOG_JSON).expect("bundled catalog is valid")
}

pub fn pms2_influence() -> InfluenceMatrix {
    InfluenceMatrix::from_csv_str(PMS2_INFLUENCE_CSV)
        .and_then(|m| m.aligned_to(&pms2_catalog()))
        .expect("bundled influence matrix is valid")
}
