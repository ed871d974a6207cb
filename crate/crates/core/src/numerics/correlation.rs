use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::grid::Grid;

/// Eigenvalue floor used when clipping an indefinite matrix.
pub const EIGEN_FLOOR: f64 = 1e-8;
/// Below this minimum eigenvalue a matrix is treated as needing repair.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Symmetric, unit-diagonal, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    inner: Grid<f64>,
}

impl CorrelationMatrix {
    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Grid::from_fn(dim, dim, |i, j| if i == j { 1.0 } else { 0.0 }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.inner[(i, j)]
    }

    pub fn as_grid(&self) -> &Grid<f64> {
        &self.inner
    }

    pub fn min_eigenvalue(&self) -> f64 {
        min_eigenvalue(&self.inner)
    }

    /// Lower-triangular `L` with `L·Lᵀ = self`.
    pub fn cholesky(&self) -> Result<Grid<f64>> {
        cholesky_psd(&self.inner)
    }
}

fn to_dmatrix(m: &Grid<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub(crate) fn min_eigenvalue(m: &Grid<f64>) -> f64 {
    if m.rows() == 0 {
        return 0.0;
    }
    let eig = SymmetricEigen::new(to_dmatrix(m));
    eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

fn check_shape(m: &Grid<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Contract(format!(
            "correlation input must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    for i in 0..n {
        if (m[(i, i)] - 1.0).abs() > 1e-9 {
            return Err(Error::Contract(format!(
                "diagonal entry ({i}, {i}) is {} (expected 1)",
                m[(i, i)]
            )));
        }
        for j in 0..i {
            if !m[(i, j)].is_finite() || (m[(i, j)] - m[(j, i)]).abs() > 1e-9 {
                return Err(Error::Contract(format!(
                    "matrix is not symmetric at ({i}, {j}): {} vs {}",
                    m[(i, j)],
                    m[(j, i)]
                )));
            }
        }
    }
    Ok(())
}

// Exact symmetry, exact unit diagonal, entries in [-1, 1].
fn canonicalize(m: &mut Grid<f64>) {
    let n = m.rows();
    for i in 0..n {
        m[(i, i)] = 1.0;
        for j in 0..i {
            let v = (0.5 * (m[(i, j)] + m[(j, i)])).clamp(-1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Repairs a symmetric unit-diagonal matrix into a valid correlation matrix.
///
/// Matrices that are already PSD (minimum eigenvalue ≥ −1e-10) come back
/// unchanged up to symmetrisation. Otherwise eigenvalues are clipped at 1e-8,
/// the matrix is rebuilt and rescaled to a unit diagonal.
pub fn nearest_correlation(m: &Grid<f64>) -> Result<CorrelationMatrix> {
    check_shape(m)?;
    let n = m.rows();
    let mut out = m.clone();
    canonicalize(&mut out);
    if n <= 1 {
        return Ok(CorrelationMatrix { inner: out });
    }

    let eig = SymmetricEigen::new(to_dmatrix(&out));
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min >= -PSD_TOLERANCE {
        return Ok(CorrelationMatrix { inner: out });
    }

    let clipped = eig.eigenvalues.map(|l| l.max(EIGEN_FLOOR));
    let v = &eig.eigenvectors;
    let rebuilt = v * DMatrix::from_diagonal(&clipped) * v.transpose();
    let scale: Vec<f64> = (0..n).map(|i| 1.0 / rebuilt[(i, i)].sqrt()).collect();
    let mut repaired = Grid::from_fn(n, n, |i, j| rebuilt[(i, j)] * scale[i] * scale[j]);
    canonicalize(&mut repaired);
    Ok(CorrelationMatrix { inner: repaired })
}

/// Cholesky factorisation tolerant of semidefinite input: a pivot that
/// vanishes (within 1e-10) zeroes its column instead of failing.
pub fn cholesky_psd(m: &Grid<f64>) -> Result<Grid<f64>> {
    let n = m.rows();
    let mut l = Grid::filled(n, n, 0.0);
    for j in 0..n {
        let mut d = m[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d < -1e-8 {
            return Err(Error::Factorization(format!(
                "negative pivot {d:.3e} at column {j}"
            )));
        }
        if d <= 1e-10 {
            // Column is (numerically) a combination of earlier ones.
            continue;
        }
        let ljj = d.sqrt();
        l[(j, j)] = ljj;
        for i in j + 1..n {
            let mut s = m[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}
