use crate::model::{FeatureCatalog, InfluenceMatrix};

/// `p_i = max_{j≠i} (|d_ij| + (1 − 2x_j) d_ij) / 2`: the strongest positive
/// dependency left unselected or negative dependency selected.
pub fn penalties(d: &InfluenceMatrix, x: &[u8]) -> Vec<f64> {
    penalties_where(d, x, |_| true)
}

/// [`penalties`] restricted to dependencies accepted by `keep`.
pub fn penalties_where(d: &InfluenceMatrix, x: &[u8], keep: impl Fn(f64) -> bool) -> Vec<f64> {
    let n = d.dim();
    (0..n)
        .map(|i| {
            let mut p = 0.0f64;
            for (j, &xj) in x.iter().enumerate() {
                let v = d.get(i, j);
                if j != i && keep(v) {
                    p = p.max(penalty_term(v, xj));
                }
            }
            p
        })
        .collect()
}

#[inline]
pub(crate) fn penalty_term(d: f64, xj: u8) -> f64 {
    match (d > 0.0, d < 0.0, xj) {
        (true, _, 0) => d,
        (_, true, 1) => -d,
        _ => 0.0,
    }
}

/// `(AV, OV)` of selection `x`.
pub fn overall_value(catalog: &FeatureCatalog, d: &InfluenceMatrix, x: &[u8]) -> (f64, f64) {
    let p = penalties(d, x);
    let mut av = 0.0;
    let mut ov = 0.0;
    for (i, f) in catalog.features().iter().enumerate() {
        if x[i] == 1 {
            av += f.value;
            ov += (1.0 - p[i]) * f.value;
        }
    }
    (av, ov)
}
