use std::path::Path;

use super::catalog::FeatureCatalog;
use super::csvio::{self, LabelledTable};
use crate::error::{Error, Result};
use crate::grid::Grid;

fn default_ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("f{i}")).collect()
}

/// For each catalog position, the row of `ids` holding that feature.
fn catalog_permutation(ids: &[String], catalog: &FeatureCatalog, source: &str) -> Result<Vec<usize>> {
    if ids.len() != catalog.len() {
        return Err(Error::Dimension {
            what: format!("{source} feature rows vs catalog"),
            expected: catalog.len(),
            found: ids.len(),
        });
    }
    let mut perm = vec![usize::MAX; catalog.len()];
    for (row, id) in ids.iter().enumerate() {
        let pos = catalog.position(id).ok_or_else(|| Error::UnknownFeature {
            id: id.clone(),
            source_name: source.to_owned(),
            row: row + 1,
        })?;
        if perm[pos] != usize::MAX {
            return Err(Error::Invalid(format!("{source}: feature `{id}` appears twice")));
        }
        perm[pos] = row;
    }
    Ok(perm)
}

/// Binary user-preference matrix: rows are features, columns are users.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceMatrix {
    feature_ids: Vec<String>,
    user_labels: Vec<String>,
    entries: Grid<u8>,
}

impl PreferenceMatrix {
    pub fn new(feature_ids: Vec<String>, user_labels: Vec<String>, entries: Grid<u8>) -> Result<Self> {
        if entries.rows() == 0 || entries.cols() == 0 {
            return Err(Error::Invalid(
                "preference matrix needs at least one feature and one user".into(),
            ));
        }
        if feature_ids.len() != entries.rows() {
            return Err(Error::Dimension {
                what: "preference feature ids".into(),
                expected: entries.rows(),
                found: feature_ids.len(),
            });
        }
        if user_labels.len() != entries.cols() {
            return Err(Error::Dimension {
                what: "preference user labels".into(),
                expected: entries.cols(),
                found: user_labels.len(),
            });
        }
        for i in 0..entries.rows() {
            if let Some(j) = entries.row(i).iter().position(|&v| v > 1) {
                return Err(Error::InvalidEntry {
                    source_name: "preference matrix".into(),
                    row: i + 1,
                    col: j + 1,
                    value: entries[(i, j)].to_string(),
                    reason: "entries must be 0 or 1".into(),
                });
            }
        }
        Ok(Self {
            feature_ids,
            user_labels,
            entries,
        })
    }

    /// Feature ids `f1..fn`, user labels `u1..uk`.
    pub fn from_grid(entries: Grid<u8>) -> Result<Self> {
        let ids = default_ids(entries.rows());
        let users = (1..=entries.cols()).map(|u| format!("u{u}")).collect();
        Self::new(ids, users, entries)
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::Invalid("ragged preference rows".into()));
        }
        Self::from_grid(Grid::from_vec(rows.len(), k, rows.concat()))
    }

    /// Builds from user columns, each listing the (0-based) features selected.
    pub fn from_user_selections(n_features: usize, users: &[&[usize]]) -> Result<Self> {
        let mut g = Grid::filled(n_features, users.len(), 0u8);
        for (u, sel) in users.iter().enumerate() {
            for &i in *sel {
                if i >= n_features {
                    return Err(Error::Invalid(format!("feature index {i} out of range")));
                }
                g[(i, u)] = 1;
            }
        }
        Self::from_grid(g)
    }

    pub fn n_features(&self) -> usize {
        self.entries.rows()
    }

    pub fn n_users(&self) -> usize {
        self.entries.cols()
    }

    pub fn feature_ids(&self) -> &[String] {
        &self.feature_ids
    }

    pub fn get(&self, feature: usize, user: usize) -> bool {
        self.entries[(feature, user)] == 1
    }

    pub fn row(&self, feature: usize) -> &[u8] {
        self.entries.row(feature)
    }

    pub fn entries(&self) -> &Grid<u8> {
        &self.entries
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        const SRC: &str = "preferences.csv";
        let table = csvio::parse_table(text, SRC)?;
        let entries = csvio::parse_cells(&table, SRC, |s| match s {
            "0" => Ok(0u8),
            "1" => Ok(1u8),
            _ => Err("preference entries must be 0 or 1".into()),
        })?;
        Self::new(table.row_labels, table.col_labels, entries)
    }

    pub fn to_csv_string(&self) -> String {
        csvio::render_with(&self.user_labels, &self.feature_ids, &self.entries, |v, out| {
            out.push(if *v == 1 { '1' } else { '0' })
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&csvio::read_text(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        csvio::write_text(path.as_ref(), &self.to_csv_string())
    }

    /// Reorders rows into catalog order.
    pub fn aligned_to(&self, catalog: &FeatureCatalog) -> Result<Self> {
        let perm = catalog_permutation(&self.feature_ids, catalog, "preferences")?;
        let k = self.n_users();
        let entries = Grid::from_fn(catalog.len(), k, |i, u| self.entries[(perm[i], u)]);
        Self::new(catalog.ids(), self.user_labels.clone(), entries)
    }
}

/// Stakeholder precedence relations: +1 requires, −1 conflicts, 0 none.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecedenceMatrix {
    ids: Vec<String>,
    entries: Grid<i8>,
}

impl PrecedenceMatrix {
    pub fn new(ids: Vec<String>, entries: Grid<i8>) -> Result<Self> {
        validate_square(&ids, entries.rows(), entries.cols(), "precedence matrix")?;
        for i in 0..entries.rows() {
            for j in 0..entries.cols() {
                let v = entries[(i, j)];
                if !(-1..=1).contains(&v) {
                    return Err(Error::InvalidEntry {
                        source_name: "precedence matrix".into(),
                        row: i + 1,
                        col: j + 1,
                        value: v.to_string(),
                        reason: "entries must be -1, 0 or 1".into(),
                    });
                }
                if i == j && v != 0 {
                    return Err(Error::InvalidEntry {
                        source_name: "precedence matrix".into(),
                        row: i + 1,
                        col: j + 1,
                        value: v.to_string(),
                        reason: "diagonal must be 0".into(),
                    });
                }
            }
        }
        Ok(Self { ids, entries })
    }

    pub fn zeros(ids: Vec<String>) -> Self {
        let n = ids.len();
        Self {
            ids,
            entries: Grid::filled(n, n, 0),
        }
    }

    pub fn from_grid(entries: Grid<i8>) -> Result<Self> {
        Self::new(default_ids(entries.rows()), entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.entries[(i, j)]
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        const SRC: &str = "precedence.csv";
        let table = csvio::parse_table(text, SRC)?;
        csvio::check_square(&table, SRC)?;
        let entries = csvio::parse_cells(&table, SRC, |s| match s {
            "0" | "+0" | "-0" => Ok(0i8),
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            _ => Err("precedence entries must be -1, 0 or 1".into()),
        })?;
        for i in 0..entries.rows() {
            if entries[(i, i)] != 0 {
                return Err(Error::InvalidEntry {
                    source_name: SRC.into(),
                    row: i + 1,
                    col: i + 1,
                    value: entries[(i, i)].to_string(),
                    reason: "diagonal must be 0".into(),
                });
            }
        }
        Self::new(table.row_labels, entries)
    }

    pub fn to_csv_string(&self) -> String {
        csvio::render(&self.ids, &self.ids, &self.entries)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&csvio::read_text(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        csvio::write_text(path.as_ref(), &self.to_csv_string())
    }

    pub fn aligned_to(&self, catalog: &FeatureCatalog) -> Result<Self> {
        let perm = catalog_permutation(&self.ids, catalog, "precedence")?;
        let n = catalog.len();
        Self::new(
            catalog.ids(),
            Grid::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]),
        )
    }
}

/// Signed dependency strengths `d[i][j] = σ·ρ ∈ [−1, 1]`: the influence of
/// feature `j` on the value of feature `i`. The diagonal is pinned to +1.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    ids: Vec<String>,
    entries: Grid<f64>,
}

impl InfluenceMatrix {
    pub fn new(ids: Vec<String>, entries: Grid<f64>) -> Result<Self> {
        validate_square(&ids, entries.rows(), entries.cols(), "influence matrix")?;
        check_signed_entries(&entries, "influence matrix")?;
        for i in 0..entries.rows() {
            if entries[(i, i)] != 1.0 {
                return Err(Error::InvalidEntry {
                    source_name: "influence matrix".into(),
                    row: i + 1,
                    col: i + 1,
                    value: entries[(i, i)].to_string(),
                    reason: "diagonal must be +1".into(),
                });
            }
        }
        Ok(Self { ids, entries })
    }

    /// Identity influence (no dependencies) over the given features.
    pub fn independent(ids: Vec<String>) -> Self {
        let n = ids.len();
        Self {
            ids,
            entries: Grid::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 }),
        }
    }

    /// Ids `f1..fn`; the diagonal is overwritten with +1.
    pub fn from_grid(mut entries: Grid<f64>) -> Result<Self> {
        for i in 0..entries.rows().min(entries.cols()) {
            entries[(i, i)] = 1.0;
        }
        Self::new(default_ids(entries.rows()), entries)
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn entries(&self) -> &Grid<f64> {
        &self.entries
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let (ids, entries) = parse_signed_square(text, "influence.csv")?;
        Self::new(ids, entries)
    }

    pub fn to_csv_string(&self) -> String {
        csvio::render(&self.ids, &self.ids, &self.entries)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&csvio::read_text(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        csvio::write_text(path.as_ref(), &self.to_csv_string())
    }

    pub fn aligned_to(&self, catalog: &FeatureCatalog) -> Result<Self> {
        let perm = catalog_permutation(&self.ids, catalog, "influence")?;
        let n = catalog.len();
        Self::new(
            catalog.ids(),
            Grid::from_fn(n, n, |i, j| self.entries[(perm[i], perm[j])]),
        )
    }
}

fn validate_square(ids: &[String], rows: usize, cols: usize, what: &str) -> Result<()> {
    if rows != cols {
        return Err(Error::Dimension {
            what: format!("{what} columns"),
            expected: rows,
            found: cols,
        });
    }
    if ids.len() != rows {
        return Err(Error::Dimension {
            what: format!("{what} ids"),
            expected: rows,
            found: ids.len(),
        });
    }
    if rows == 0 {
        return Err(Error::Invalid(format!("{what} is empty")));
    }
    Ok(())
}

pub(crate) fn check_signed_entries(entries: &Grid<f64>, what: &str) -> Result<()> {
    for i in 0..entries.rows() {
        for j in 0..entries.cols() {
            let v = entries[(i, j)];
            if !(v.is_finite() && (-1.0..=1.0).contains(&v)) {
                return Err(Error::InvalidEntry {
                    source_name: what.into(),
                    row: i + 1,
                    col: j + 1,
                    value: v.to_string(),
                    reason: "entries must lie in [-1, 1]".into(),
                });
            }
        }
    }
    Ok(())
}

/// Parses a square signed-real CSV (influence/eells format) without
/// diagonal requirements.
pub(crate) fn parse_signed_square(text: &str, source: &str) -> Result<(Vec<String>, Grid<f64>)> {
    let table: LabelledTable = csvio::parse_table(text, source)?;
    csvio::check_square(&table, source)?;
    let entries = csvio::parse_cells(&table, source, |s| {
        let v = csvio::parse_f64(s)?;
        if !(-1.0..=1.0).contains(&v) {
            return Err("entries must lie in [-1, 1]".into());
        }
        Ok(v)
    })?;
    Ok((table.row_labels, entries))
}
