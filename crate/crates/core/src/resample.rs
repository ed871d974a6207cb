//! Correlated binary resampling through a dichotomized latent Gaussian.
//!
//! A feature with selection rate `μ_i` is modelled as `1[γ_i + Z_i > 0]`
//! with `γ_i = Φ⁻¹(μ_i)` and `Z` standard multivariate normal. Each pair's
//! latent correlation is solved so that the joint selection rate matches
//! `μ_i μ_j + σ_ij`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::PreferenceMatrix;
use crate::numerics::{bvn_lower, cholesky_psd, nearest_correlation, quantile_open, CorrelationMatrix, SeededRng};

const R_LO: f64 = -1.0 + 1e-9;
const R_HI: f64 = 1.0 - 1e-9;
const MAX_BISECTIONS: usize = 200;
const MATCH_TOLERANCE: f64 = 1e-8;
const FRECHET_SLACK: f64 = 1e-9;
const CHUNK: usize = 4096;

/// First and second moments of a binary preference matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTargets {
    mu: Vec<f64>,
    sigma: Grid<f64>,
}

impl MomentTargets {
    /// Pairs outside the Fréchet range are accepted here and clamped by
    /// [`calibrate_latent`].
    pub fn new(mu: Vec<f64>, sigma: Grid<f64>) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(Error::Invalid("moment targets need at least one feature".into()));
        }
        if sigma.rows() != n || sigma.cols() != n {
            return Err(Error::Dimension {
                what: "covariance matrix".into(),
                expected: n,
                found: sigma.rows(),
            });
        }
        if let Some(&m) = mu.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::Domain {
                what: "mean must lie in [0, 1]",
                value: m,
            });
        }
        for i in 0..n {
            if (sigma[(i, i)] - mu[i] * (1.0 - mu[i])).abs() > 1e-9 {
                return Err(Error::Contract(format!(
                    "variance of feature {i} must equal mu(1-mu)"
                )));
            }
            for j in 0..i {
                if !sigma[(i, j)].is_finite() || (sigma[(i, j)] - sigma[(j, i)]).abs() > 1e-12 {
                    return Err(Error::Contract(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { mu, sigma })
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> &Grid<f64> {
        &self.sigma
    }

    /// Attainable covariance range of a binary pair with these marginals.
    pub fn frechet_bounds(&self, i: usize, j: usize) -> (f64, f64) {
        let (a, b) = (self.mu[i], self.mu[j]);
        ((a + b - 1.0).max(0.0) - a * b, a.min(b) - a * b)
    }
}

/// Row means and population (÷k) covariance.
pub fn estimate_moments(m: &PreferenceMatrix) -> MomentTargets {
    let n = m.n_features();
    let k = m.n_users() as f64;
    let mu: Vec<f64> = (0..n)
        .map(|i| m.row(i).iter().map(|&v| v as u64).sum::<u64>() as f64 / k)
        .collect();
    let mut sigma = Grid::filled(n, n, 0.0);
    for i in 0..n {
        for j in 0..=i {
            let both = m
                .row(i)
                .iter()
                .zip(m.row(j))
                .filter(|(a, b)| **a == 1 && **b == 1)
                .count() as f64;
            let c = both / k - mu[i] * mu[j];
            sigma[(i, j)] = c;
            sigma[(j, i)] = c;
        }
        sigma[(i, i)] = mu[i] * (1.0 - mu[i]);
    }
    MomentTargets { mu, sigma }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Calibrated,
    /// Target sits on a Fréchet bound; latent correlation is exactly ±1.
    Boundary,
    /// Target was outside the attainable range and moved to the nearest end.
    Clamped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairCalibration {
    pub i: usize,
    pub j: usize,
    pub target: f64,
    pub achieved: f64,
    pub latent: f64,
    pub status: PairStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DichotomizedGaussianModel {
    ids: Vec<String>,
    gamma: Vec<f64>,
    latent_corr: CorrelationMatrix,
    /// `(feature, value)` for every row with mean 0 or 1.
    constant_rows: Vec<(usize, u8)>,
    pairs: Vec<PairCalibration>,
    seed: u64,
}

impl DichotomizedGaussianModel {
    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// Latent thresholds; 0 for constant rows.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn latent_corr(&self) -> &CorrelationMatrix {
        &self.latent_corr
    }

    pub fn constant_rows(&self) -> &[(usize, u8)] {
        &self.constant_rows
    }

    pub fn pairs(&self) -> &[PairCalibration] {
        &self.pairs
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.dim() {
            return Err(Error::Dimension {
                what: "model feature ids".into(),
                expected: self.dim(),
                found: ids.len(),
            });
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    fn is_constant(&self, i: usize) -> bool {
        self.constant_rows.iter().any(|&(r, _)| r == i)
    }
}

fn calibrate_pair(i: usize, j: usize, gi: f64, gj: f64, t: &MomentTargets) -> Result<PairCalibration> {
    let (mi, mj) = (t.mu[i], t.mu[j]);
    let target = mi * mj + t.sigma[(i, j)];
    let (lo_bound, hi_bound) = ((mi + mj - 1.0).max(0.0), mi.min(mj));
    let f = |r: f64| bvn_lower(gi, gj, r);
    let edge = |latent: f64, bound: f64| {
        let status = if (target - bound).abs() <= FRECHET_SLACK
            || (lo_bound..=hi_bound).contains(&target)
        {
            PairStatus::Boundary
        } else {
            PairStatus::Clamped
        };
        PairCalibration {
            i,
            j,
            target,
            achieved: bound,
            latent,
            status,
        }
    };
    if target > f(R_HI) + MATCH_TOLERANCE {
        return Ok(edge(1.0, hi_bound));
    }
    if target < f(R_LO) - MATCH_TOLERANCE {
        return Ok(edge(-1.0, lo_bound));
    }
    let (mut lo, mut hi) = (R_LO, R_HI);
    let mut mid = 0.5 * (lo + hi);
    let mut val = f(mid);
    for _ in 0..MAX_BISECTIONS {
        if val == target || hi - lo < 1e-14 {
            break;
        }
        if val < target {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        val = f(mid);
    }
    if (val - target).abs() > MATCH_TOLERANCE {
        return Err(Error::Calibration {
            i,
            j,
            reason: format!(
                "bisection stalled at r = {mid:.6} with residual {:.3e}",
                val - target
            ),
        });
    }
    Ok(PairCalibration {
        i,
        j,
        target,
        achieved: val,
        latent: mid,
        status: PairStatus::Calibrated,
    })
}

/// Solves every pair's latent correlation and repairs the assembled matrix.
pub fn calibrate_latent(t: &MomentTargets) -> Result<DichotomizedGaussianModel> {
    let n = t.dim();
    let constant_rows: Vec<(usize, u8)> = (0..n)
        .filter_map(|i| match t.mu[i] {
            m if m <= 0.0 => Some((i, 0)),
            m if m >= 1.0 => Some((i, 1)),
            _ => None,
        })
        .collect();
    let active: Vec<usize> = (0..n).filter(|i| !constant_rows.iter().any(|c| c.0 == *i)).collect();
    let gamma: Vec<f64> = (0..n)
        .map(|i| if active.contains(&i) { quantile_open(t.mu[i]) } else { 0.0 })
        .collect();

    let mut pair_idx = Vec::new();
    for (a, &i) in active.iter().enumerate() {
        for &j in &active[a + 1..] {
            pair_idx.push((i, j));
        }
    }
    let pairs = pair_idx
        .par_iter()
        .map(|&(i, j)| calibrate_pair(i, j, gamma[i], gamma[j], t))
        .collect::<Result<Vec<_>>>()?;

    let mut raw = Grid::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 });
    for p in &pairs {
        raw[(p.i, p.j)] = p.latent;
        raw[(p.j, p.i)] = p.latent;
    }
    let latent_corr = nearest_correlation(&raw)?;
    Ok(DichotomizedGaussianModel {
        ids: (1..=n).map(|i| format!("f{i}")).collect(),
        gamma,
        latent_corr,
        constant_rows,
        pairs,
        seed: 0,
    })
}

/// Draws `count` synthetic users. Columns are produced in fixed-size chunks,
/// chunk `c` on RNG stream `c`, so output is independent of thread count.
pub fn generate(model: &DichotomizedGaussianModel, count: usize) -> Result<PreferenceMatrix> {
    if count == 0 {
        return Err(Error::Invalid("sample count must be positive".into()));
    }
    let n = model.dim();
    let active: Vec<usize> = (0..n).filter(|&i| !model.is_constant(i)).collect();
    let m = active.len();
    let sub = Grid::from_fn(m, m, |a, b| model.latent_corr.get(active[a], active[b]));
    let l = cholesky_psd(&sub).map_err(|e| Error::Factorization(format!("latent correlation: {e}")))?;
    let g: Vec<f64> = active.iter().map(|&i| model.gamma[i]).collect();

    let n_chunks = count.div_ceil(CHUNK);
    // Each chunk yields a column-major block of `n × width` bits.
    let blocks: Vec<Vec<u8>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let width = CHUNK.min(count - c * CHUNK);
            let mut rng = SeededRng::with_stream(model.seed, c as u64);
            let mut out = vec![0u8; width * n];
            let mut u = vec![0.0; m];
            for col in 0..width {
                for v in u.iter_mut() {
                    *v = rng.standard_normal();
                }
                let cell = &mut out[col * n..(col + 1) * n];
                for (a, &i) in active.iter().enumerate() {
                    let row = l.row(a);
                    let z = g[a] + row[..=a].iter().zip(&u).map(|(x, y)| x * y).sum::<f64>();
                    cell[i] = (z > 0.0) as u8;
                }
                for &(i, v) in &model.constant_rows {
                    cell[i] = v;
                }
            }
            out
        })
        .collect();

    let mut entries = Grid::filled(n, count, 0u8);
    for (c, block) in blocks.iter().enumerate() {
        for (off, cell) in block.chunks_exact(n).enumerate() {
            let col = c * CHUNK + off;
            for (i, &v) in cell.iter().enumerate() {
                entries[(i, col)] = v;
            }
        }
    }
    let users = (1..=count).map(|u| format!("s{u}")).collect();
    PreferenceMatrix::new(model.ids.clone(), users, entries)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityReport {
    pub features: usize,
    pub samples: usize,
    pub seed: Option<u64>,
    pub max_mean_deviation: f64,
    /// Over pairs whose calibration status is `calibrated` (all pairs when no
    /// model is supplied).
    pub max_cov_deviation: f64,
    pub clamped_pairs: usize,
    pub boundary_pairs: usize,
    pub pair_diagnostics: Vec<PairCalibration>,
}

impl FidelityReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Compares the moments of `generated` with `targets`. Pass the model to
/// exclude boundary and clamped pairs from the covariance deviation.
pub fn validate_moments(
    generated: &PreferenceMatrix,
    targets: &MomentTargets,
    model: Option<&DichotomizedGaussianModel>,
) -> Result<FidelityReport> {
    let n = targets.dim();
    if generated.n_features() != n {
        return Err(Error::Dimension {
            what: "generated feature rows".into(),
            expected: n,
            found: generated.n_features(),
        });
    }
    let got = estimate_moments(generated);
    let max_mean_deviation = (0..n)
        .map(|i| (got.mu[i] - targets.mu[i]).abs())
        .fold(0.0, f64::max);
    let excluded = |i: usize, j: usize| {
        model.is_some_and(|m| {
            m.pairs
                .iter()
                .any(|p| p.status != PairStatus::Calibrated && (p.i, p.j) == (i.min(j), i.max(j)))
        })
    };
    let mut max_cov_deviation = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            if i != j && excluded(i, j) {
                continue;
            }
            max_cov_deviation = max_cov_deviation.max((got.sigma[(i, j)] - targets.sigma[(i, j)]).abs());
        }
    }
    let diagnostics: Vec<PairCalibration> = model
        .map(|m| m.pairs.iter().filter(|p| p.status != PairStatus::Calibrated).cloned().collect())
        .unwrap_or_default();
    Ok(FidelityReport {
        features: n,
        samples: generated.n_users(),
        seed: model.map(|m| m.seed),
        max_mean_deviation,
        max_cov_deviation,
        clamped_pairs: diagnostics.iter().filter(|p| p.status == PairStatus::Clamped).count(),
        boundary_pairs: diagnostics.iter().filter(|p| p.status == PairStatus::Boundary).count(),
        pair_diagnostics: diagnostics,
    })
}

/// Moments → calibration → `count` samples under `seed`.
pub fn resample(m: &PreferenceMatrix, count: usize, seed: u64) -> Result<(PreferenceMatrix, FidelityReport)> {
    let targets = estimate_moments(m);
    let model = calibrate_latent(&targets)?
        .with_seed(seed)
        .with_ids(m.feature_ids().to_vec())?;
    let synthetic = generate(&model, count)?;
    let report = validate_moments(&synthetic, &targets, Some(&model))?;
    Ok((synthetic, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn two(mu: f64, cov: f64) -> MomentTargets {
        let v = mu * (1.0 - mu);
        MomentTargets::new(vec![mu, mu], Grid::from_vec(2, 2, vec![v, cov, cov, v])).unwrap()
    }

    #[test]
    fn moments_examples() {
        let m = PreferenceMatrix::from_rows(&[vec![1, 1, 0, 0], vec![1, 0, 1, 0], vec![0, 1, 0, 1]]).unwrap();
        let t = estimate_moments(&m);
        assert_eq!(t.mu()[0], 0.5);
        assert_eq!(t.sigma()[(0, 0)], 0.25);
        assert_eq!(t.sigma()[(1, 2)], -0.25);

        let same = PreferenceMatrix::from_rows(&[vec![1, 0, 1, 1], vec![1, 0, 1, 1]]).unwrap();
        let t = estimate_moments(&same);
        assert_eq!(t.sigma()[(0, 1)], t.sigma()[(0, 0)]);
    }

    #[test]
    fn independence_maps_to_zero() {
        let model = calibrate_latent(&two(0.5, 0.0)).unwrap();
        assert!(model.latent_corr().get(0, 1).abs() < 1e-8);
    }

    #[test]
    fn orthant_target_inverts_arcsine() {
        // 1/4 + arcsin(r)/(2π) = 1/3  ⇒  r = sin(π/6)
        let model = calibrate_latent(&two(0.5, 1.0 / 3.0 - 0.25)).unwrap();
        let expected = (2.0 * PI * (1.0 / 3.0 - 0.25)).sin();
        assert!((model.latent_corr().get(0, 1) - expected).abs() < 1e-6);
        assert_eq!(model.pairs()[0].status, PairStatus::Calibrated);
    }

    #[test]
    fn perfect_dependence_hits_boundary() {
        let model = calibrate_latent(&two(0.5, 0.25)).unwrap();
        assert_eq!(model.latent_corr().get(0, 1), 1.0);
        assert_eq!(model.pairs()[0].status, PairStatus::Boundary);
    }

    #[test]
    fn infeasible_target_is_clamped() {
        let model = calibrate_latent(&two(0.3, 0.9)).unwrap();
        assert_eq!(model.pairs()[0].status, PairStatus::Clamped);
        assert_eq!(model.latent_corr().get(0, 1), 1.0);
    }

    #[test]
    fn single_feature_mean() {
        let t = MomentTargets::new(vec![0.5], Grid::from_vec(1, 1, vec![0.25])).unwrap();
        let model = calibrate_latent(&t).unwrap().with_seed(11);
        let g = generate(&model, 100_000).unwrap();
        let mean = estimate_moments(&g).mu()[0];
        assert!((mean - 0.5).abs() < 0.005, "{mean}");
    }

    #[test]
    fn constant_row_bypass() {
        let t = MomentTargets::new(vec![1.0, 0.4], Grid::from_vec(2, 2, vec![0.0, 0.0, 0.0, 0.24])).unwrap();
        for seed in [1, 2, 3] {
            let model = calibrate_latent(&t).unwrap().with_seed(seed);
            let g = generate(&model, 1000).unwrap();
            assert!(g.row(0).iter().all(|&v| v == 1));
        }
    }

    #[test]
    fn comonotone_rows_match() {
        let model = calibrate_latent(&two(0.5, 0.25)).unwrap().with_seed(5);
        let g = generate(&model, 5000).unwrap();
        assert_eq!(g.row(0), g.row(1));
    }

    #[test]
    fn deterministic_under_seed() {
        let model = calibrate_latent(&two(0.4, 0.1)).unwrap().with_seed(9);
        let a = generate(&model, 10_000).unwrap();
        let b = generate(&model, 10_000).unwrap();
        assert_eq!(a, b);
        let c = generate(&model.clone().with_seed(10), 10_000).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn self_comparison_is_exact() {
        let m = PreferenceMatrix::from_rows(&[vec![1, 0, 1, 1, 0], vec![0, 0, 1, 1, 1]]).unwrap();
        let r = validate_moments(&m, &estimate_moments(&m), None).unwrap();
        assert_eq!(r.max_mean_deviation, 0.0);
        assert_eq!(r.max_cov_deviation, 0.0);
    }

    #[test]
    fn clamp_surfaces_in_report() {
        let t = two(0.3, 0.9 - 0.09);
        let model = calibrate_latent(&t).unwrap().with_seed(1);
        let g = generate(&model, 1000).unwrap();
        let r = validate_moments(&g, &t, Some(&model)).unwrap();
        assert!(r.clamped_pairs + r.boundary_pairs > 0);
        assert!(r.to_json_string().contains("clamped"));
    }

    #[test]
    fn four_feature_fidelity() {
        let seed_data = {
            let mut rng = SeededRng::new(3);
            let rows: Vec<Vec<u8>> = (0..4)
                .map(|_| (0..400).map(|_| rng.bernoulli(0.5) as u8).collect())
                .collect();
            let mut rows = rows;
            // Induce dependence.
            for u in 0..400 {
                if rows[0][u] == 1 && rng.bernoulli(0.7) {
                    rows[1][u] = 1;
                }
            }
            PreferenceMatrix::from_rows(&rows).unwrap()
        };
        let (g, report) = resample(&seed_data, 100_000, 42).unwrap();
        assert_eq!(g.n_users(), 100_000);
        assert!(report.max_mean_deviation <= 0.01, "{report:?}");
        assert!(report.max_cov_deviation <= 0.02, "{report:?}");
    }
}
