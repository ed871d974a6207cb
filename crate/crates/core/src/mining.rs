//! Co-selection counting and Eells' measure of causal strength,
//! `η[i][j] = p(f_i | f_j) − p(f_i | ¬f_j)`, mined from a preference matrix.

use std::path::Path;

use crate::error::Result;
use crate::grid::Grid;
use crate::model::{check_signed_entries, csvio, parse_signed_square, PreferenceMatrix};

/// `n × 2n` co-selection counts. Column `j` counts users selecting both
/// `f_i` and `f_j`; column `j + n` counts users selecting `f_i` but not `f_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountMatrix {
    n: usize,
    users: usize,
    lambda: Grid<u64>,
}

impl CountMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn users(&self) -> usize {
        self.users
    }

    /// Users selecting both `i` and `j`.
    pub fn both(&self, i: usize, j: usize) -> u64 {
        self.lambda[(i, j)]
    }

    /// Users selecting `i` without `j`.
    pub fn only_first(&self, i: usize, j: usize) -> u64 {
        self.lambda[(i, j + self.n)]
    }

    /// Users selecting `i`.
    pub fn selected(&self, i: usize) -> u64 {
        self.lambda[(i, i)]
    }

    pub fn as_grid(&self) -> &Grid<u64> {
        &self.lambda
    }
}

/// One pass over the users, tallying pairs of co-selected features.
pub fn count_cooccurrence(m: &PreferenceMatrix) -> CountMatrix {
    let n = m.n_features();
    let k = m.n_users();
    let mut lambda = Grid::filled(n, 2 * n, 0u64);
    let mut selected = Vec::with_capacity(n);
    for u in 0..k {
        selected.clear();
        selected.extend((0..n).filter(|&i| m.get(i, u)));
        for &i in &selected {
            for &j in &selected {
                lambda[(i, j)] += 1;
            }
        }
    }
    // λ[i][j+n] = λ[i][i] − λ[i][j]: every user selecting f_i either selects
    // f_j or not.
    for i in 0..n {
        let own = lambda[(i, i)];
        for j in 0..n {
            lambda[(i, j + n)] = own - lambda[(i, j)];
        }
    }
    CountMatrix {
        n,
        users: k,
        lambda,
    }
}

/// Signed causal strengths in `[−1, 1]`; generally not symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct EellsMatrix {
    ids: Vec<String>,
    eta: Grid<f64>,
    never_selected: Vec<usize>,
    always_selected: Vec<usize>,
}

impl EellsMatrix {
    pub fn new(ids: Vec<String>, eta: Grid<f64>) -> Result<Self> {
        check_signed_entries(&eta, "eells matrix")?;
        Ok(Self {
            ids,
            eta,
            never_selected: Vec::new(),
            always_selected: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.eta.rows()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.eta[(i, j)]
    }

    pub fn as_grid(&self) -> &Grid<f64> {
        &self.eta
    }

    /// Features no user selected; their conditional `p(·|f_j)` was defined as 0.
    pub fn never_selected(&self) -> &[usize] {
        &self.never_selected
    }

    /// Features every user selected; their `p(·|¬f_j)` was defined as 0.
    pub fn always_selected(&self) -> &[usize] {
        &self.always_selected
    }

    pub fn to_csv_string(&self) -> String {
        csvio::render(&self.ids, &self.ids, &self.eta)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let (ids, eta) = parse_signed_square(text, "eells.csv")?;
        Self::new(ids, eta)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv_str(&csvio::read_text(path.as_ref())?)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        csvio::write_text(path.as_ref(), &self.to_csv_string())
    }
}

/// `η[i][j] = λ[i][j]/λ[j][j] − λ[i][j+n]/(k − λ[j][j])`, with each `0/0`
/// ratio taken as 0.
pub fn eells_matrix(counts: &CountMatrix, ids: &[String]) -> EellsMatrix {
    let n = counts.dim();
    let k = counts.users() as u64;
    let eta = Grid::from_fn(n, n, |i, j| {
        let with_j = counts.selected(j);
        let without_j = k - with_j;
        let pos = if with_j == 0 {
            0.0
        } else {
            counts.both(i, j) as f64 / with_j as f64
        };
        let neg = if without_j == 0 {
            0.0
        } else {
            counts.only_first(i, j) as f64 / without_j as f64
        };
        pos - neg
    });
    EellsMatrix {
        ids: ids.to_vec(),
        eta,
        never_selected: (0..n).filter(|&j| counts.selected(j) == 0).collect(),
        always_selected: (0..n).filter(|&j| counts.selected(j) == k).collect(),
    }
}

/// Counts and strengths in one call.
pub fn mine(m: &PreferenceMatrix) -> EellsMatrix {
    eells_matrix(&count_cooccurrence(m), m.feature_ids())
}

#[cfg(test)]
mod tests {
    use super::*;

    // Direct conditional probabilities over user columns.
    fn brute_eells(m: &PreferenceMatrix, i: usize, j: usize) -> f64 {
        let k = m.n_users();
        let (mut ij, mut j_cnt, mut i_not_j, mut not_j) = (0, 0, 0, 0);
        for u in 0..k {
            if m.get(j, u) {
                j_cnt += 1;
                ij += m.get(i, u) as usize;
            } else {
                not_j += 1;
                i_not_j += m.get(i, u) as usize;
            }
        }
        let p = if j_cnt == 0 { 0.0 } else { ij as f64 / j_cnt as f64 };
        let q = if not_j == 0 { 0.0 } else { i_not_j as f64 / not_j as f64 };
        p - q
    }

    #[test]
    fn counts_small_example() {
        let m = PreferenceMatrix::from_user_selections(2, &[&[0, 1], &[1], &[0], &[]]).unwrap();
        let c = count_cooccurrence(&m);
        assert_eq!(c.selected(0), 2);
        assert_eq!(c.selected(1), 2);
        assert_eq!(c.both(0, 1), 1);
        assert_eq!(c.only_first(0, 1), 1);
        assert_eq!(c.only_first(0, 0), 0);
    }

    #[test]
    fn counts_all_ones_and_zeros() {
        let ones = PreferenceMatrix::from_rows(&[vec![1, 1, 1], vec![1, 1, 1]]).unwrap();
        let c = count_cooccurrence(&ones);
        assert_eq!(c.both(0, 1), 3);
        assert_eq!(c.only_first(0, 1), 0);

        let zeros = PreferenceMatrix::from_rows(&[vec![0, 0], vec![0, 0]]).unwrap();
        assert!(count_cooccurrence(&zeros).as_grid().as_slice().iter().all(|&v| v == 0));
    }

    #[test]
    fn eells_worked_example() {
        let m = PreferenceMatrix::from_user_selections(2, &[&[0, 1], &[0, 1], &[1], &[]]).unwrap();
        let e = mine(&m);
        assert!((e.get(0, 1) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.get(0, 0), 1.0);
        assert_eq!(e.get(1, 1), 1.0);
    }

    #[test]
    fn constant_feature_is_independent() {
        // f1 chosen by everyone, f2 by some.
        let m = PreferenceMatrix::from_rows(&[vec![1, 1, 1, 1], vec![1, 0, 1, 0]]).unwrap();
        let e = mine(&m);
        assert_eq!(e.get(0, 1), 0.0);
        assert_eq!(e.always_selected(), &[0]);
        assert!(e.never_selected().is_empty());
    }

    #[test]
    fn never_selected_feature() {
        let m = PreferenceMatrix::from_rows(&[vec![0, 0, 0], vec![1, 0, 1]]).unwrap();
        let e = mine(&m);
        assert_eq!(e.get(0, 0), 0.0);
        // p(f2|f1) undefined → 0, p(f2|¬f1) = 2/3
        assert!((e.get(1, 0) + 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(e.never_selected(), &[0]);
    }

    #[test]
    fn matches_brute_force_on_fixed_matrix() {
        let rows = vec![
            vec![1, 0, 1, 1, 0, 0, 1],
            vec![0, 0, 1, 1, 1, 0, 1],
            vec![1, 1, 1, 0, 0, 0, 0],
        ];
        let m = PreferenceMatrix::from_rows(&rows).unwrap();
        let e = mine(&m);
        for i in 0..3 {
            for j in 0..3 {
                assert!((e.get(i, j) - brute_eells(&m, i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let m = PreferenceMatrix::from_rows(&[vec![1, 0, 1], vec![0, 1, 1]]).unwrap();
        let e = mine(&m);
        let back = EellsMatrix::from_csv_str(&e.to_csv_string()).unwrap();
        assert_eq!(back.as_grid(), e.as_grid());
    }
}
