//! Univariate standard normal distribution function and its inverse.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Standard normal density.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / SQRT_2PI
}

/// `Φ(x)`, accepting infinities. Used internally where inputs are already
/// known to be well formed.
#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal CDF `Φ(x)`.
///
/// Evaluated through the complementary error function, so the lower tail
/// keeps full relative precision and the absolute error is at the level of
/// double rounding.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain {
            what: "normal cdf argument must be finite",
            value: x,
        });
    }
    Ok(phi(x))
}

/// Inverse standard normal CDF `Φ⁻¹(p)` for `0 < p < 1`.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "normal quantile requires 0 < p < 1",
            value: p,
        });
    }
    Ok(quantile_open(p))
}

pub(crate) fn quantile_open(p: f64) -> f64 {
    if p == 0.5 {
        0.0
    } else if p < 0.5 {
        lower_quantile(p)
    } else {
        // 1 - p is exact for p >= 0.5
        -lower_quantile(1.0 - p)
    }
}

#[allow(clippy::excessive_precision)]
const A: [f64; 6] = [
    -3.969683028665376e+01,
    2.209460984245205e+02,
    -2.759285104469687e+02,
    1.383577518672690e+02,
    -3.066479806614716e+01,
    2.506628277459239e+00,
];
#[allow(clippy::excessive_precision)]
const B: [f64; 5] = [
    -5.447609879822406e+01,
    1.615858368580409e+02,
    -1.556989798598866e+02,
    6.680131188771972e+01,
    -1.328068155288572e+01,
];
#[allow(clippy::excessive_precision)]
const C: [f64; 6] = [
    -7.784894002430293e-03,
    -3.223964580411365e-01,
    -2.400758277161838e+00,
    -2.549732539343734e+00,
    4.374664141464968e+00,
    2.938163982698783e+00,
];
#[allow(clippy::excessive_precision)]
const D: [f64; 4] = [
    7.784695709041462e-03,
    3.224671290700398e-01,
    2.445134137142996e+00,
    3.754408661907416e+00,
];

// Acklam's rational approximation (relative error ~1e-9) followed by Halley
// steps against the erfc-based CDF. Only valid for 0 < q < 0.5.
fn lower_quantile(q: f64) -> f64 {
    const Q_LOW: f64 = 0.02425;
    let mut z = if q < Q_LOW {
        let t = (-2.0 * q.ln()).sqrt();
        (((((C[0] * t + C[1]) * t + C[2]) * t + C[3]) * t + C[4]) * t + C[5])
            / ((((D[0] * t + D[1]) * t + D[2]) * t + D[3]) * t + 1.0)
    } else {
        let u = q - 0.5;
        let r = u * u;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * u
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let e = phi(z) - q;
        let u = e * (2.0 * PI).sqrt() * (0.5 * z * z).exp();
        let step = u / (1.0 + 0.5 * z * u);
        if !step.is_finite() {
            break;
        }
        z -= step;
        if step.abs() <= 1e-16 * z.abs().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson integration of the density; independent of erfc.
    fn density_integral_oracle(x: f64) -> f64 {
        let n = 20_000;
        let h = x / n as f64;
        let mut s = std_normal_pdf(0.0) + std_normal_pdf(x);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * std_normal_pdf(i as f64 * h);
        }
        0.5 + s * h / 3.0
    }

    #[test]
    fn cdf_at_zero_is_half() {
        assert_eq!(std_normal_cdf(0.0).unwrap(), 0.5);
    }

    #[test]
    fn cdf_saturates_at_eight() {
        assert!((std_normal_cdf(8.0).unwrap() - 1.0).abs() <= 1e-12);
        assert!(std_normal_cdf(-8.0).unwrap() <= 1e-12);
    }

    #[test]
    fn cdf_matches_quadrature_oracle() {
        let oracle = density_integral_oracle(1.0);
        assert!((oracle - 0.841_344_746).abs() < 1e-9);
        for x in [-3.0, -1.5, -0.25, 0.5, 1.0, 2.0, 4.0] {
            let expected = density_integral_oracle(x);
            let got = std_normal_cdf(x).unwrap();
            assert!((got - expected).abs() <= 1e-12, "x={x}: {got} vs {expected}");
        }
    }

    #[test]
    fn cdf_rejects_non_finite() {
        assert!(std_normal_cdf(f64::NAN).is_err());
        assert!(std_normal_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn cdf_is_monotone_on_dense_grid() {
        let mut prev = 0.0;
        for i in 0..10_000 {
            let x = -9.0 + 18.0 * i as f64 / 9_999.0;
            let p = std_normal_cdf(x).unwrap();
            assert!(p >= prev);
            prev = p;
        }
    }

    #[test]
    fn quantile_examples() {
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.841_344_746).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn quantile_round_trip() {
        for x in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0] {
            let back = std_normal_quantile(std_normal_cdf(x).unwrap()).unwrap();
            assert!((back - x).abs() < 1e-8, "x={x} back={back}");
        }
    }

    #[test]
    fn quantile_inverts_cdf_across_range() {
        for k in 1..=2000 {
            let ln_p = -27.6 * k as f64 / 2000.0;
            for p in [ln_p.exp(), 1.0 - ln_p.exp()] {
                if !(p > 0.0 && p < 1.0) {
                    continue;
                }
                let z = std_normal_quantile(p).unwrap();
                assert!((phi(z) - p).abs() <= 1e-9 * p.max(1e-300).min(1.0) + 1e-15);
            }
        }
    }

    #[test]
    fn quantile_domain() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err(), "p={p}");
        }
    }
}
