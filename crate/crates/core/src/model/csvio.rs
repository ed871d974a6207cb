//! Labelled CSV matrices: a header row `feature,<col labels...>` followed by
//! one row per feature, first cell the feature id.

use std::fmt::Display;
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::Grid;

pub(crate) struct LabelledTable {
    pub col_labels: Vec<String>,
    pub row_labels: Vec<String>,
    pub cells: Vec<Vec<String>>,
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub(crate) fn parse_table(text: &str, source: &str) -> Result<LabelledTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::Invalid(format!("{source}: empty file"))),
    };
    if header.is_empty() || header.len() < 2 {
        return Err(Error::Invalid(format!(
            "{source}: header must be `feature,<labels...>`"
        )));
    }
    let col_labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut row_labels = Vec::new();
    let mut cells = Vec::new();
    for (r, rec) in records.enumerate() {
        let rec = rec?;
        if rec.len() == 1 && rec.get(0) == Some("") {
            continue;
        }
        if rec.len() != col_labels.len() + 1 {
            return Err(Error::Dimension {
                what: format!("{source} row {} column count", r + 1),
                expected: col_labels.len(),
                found: rec.len().saturating_sub(1),
            });
        }
        row_labels.push(rec[0].to_owned());
        cells.push(rec.iter().skip(1).map(str::to_owned).collect());
    }
    if row_labels.is_empty() {
        return Err(Error::Invalid(format!("{source}: no data rows")));
    }
    Ok(LabelledTable {
        col_labels,
        row_labels,
        cells,
    })
}

pub(crate) fn parse_cells<T>(
    table: &LabelledTable,
    source: &str,
    mut parse: impl FnMut(&str) -> std::result::Result<T, String>,
) -> Result<Grid<T>> {
    let rows = table.row_labels.len();
    let cols = table.col_labels.len();
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in table.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            let v = parse(cell).map_err(|reason| Error::InvalidEntry {
                source_name: source.to_owned(),
                row: i + 1,
                col: j + 1,
                value: cell.clone(),
                reason,
            })?;
            data.push(v);
        }
    }
    Ok(Grid::from_vec(rows, cols, data))
}

pub(crate) fn render<T: Display>(col_labels: &[String], row_labels: &[String], g: &Grid<T>) -> String {
    render_with(col_labels, row_labels, g, |v, out| {
        use std::fmt::Write;
        let _ = write!(out, "{v}");
    })
}

pub(crate) fn render_with<T>(
    col_labels: &[String],
    row_labels: &[String],
    g: &Grid<T>,
    mut cell: impl FnMut(&T, &mut String),
) -> String {
    let mut out = String::with_capacity(g.rows() * g.cols() * 4 + 64);
    out.push_str("feature");
    for c in col_labels {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, label) in row_labels.iter().enumerate() {
        out.push_str(label);
        for v in g.row(i) {
            out.push(',');
            cell(v, &mut out);
        }
        out.push('\n');
    }
    out
}

pub(crate) fn parse_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| "not a number".to_owned())?;
    if !v.is_finite() {
        return Err("not finite".into());
    }
    Ok(v)
}

/// Square matrices must have identical row and column labels.
pub(crate) fn check_square(table: &LabelledTable, source: &str) -> Result<()> {
    let n = table.row_labels.len();
    if table.col_labels.len() != n {
        return Err(Error::Dimension {
            what: format!("{source} (square matrix) columns"),
            expected: n,
            found: table.col_labels.len(),
        });
    }
    for (j, (c, r)) in table.col_labels.iter().zip(&table.row_labels).enumerate() {
        if c != r {
            return Err(Error::Invalid(format!(
                "{source}: column {} label `{c}` does not match row label `{r}`",
                j + 1
            )));
        }
    }
    Ok(())
}
