//! Bivariate standard normal CDF.
//!
//! Genz's refinement of the Drezner–Wesolowsky method: Gauss–Legendre
//! quadrature of the Plackett-style integral for moderate |ρ|, and an
//! asymptotic expansion plus quadrature of the remainder for |ρ| ≥ 0.925.
#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

use super::normal::phi;
use crate::error::{Error, Result};

// (weight, abscissa) for the positive half of each symmetric rule.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705e+00, 0.9324695142031522e+00),
    (0.3607615730481384e+00, 0.6612093864662647e+00),
    (0.4679139345726904e+00, 0.2386191860831970e+00),
];

const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-01, 0.9815606342467191e+00),
    (0.1069393259953183e+00, 0.9041172563704750e+00),
    (0.1600783285433464e+00, 0.7699026741943050e+00),
    (0.2031674267230659e+00, 0.5873179542866171e+00),
    (0.2334925365383547e+00, 0.3678314989981802e+00),
    (0.2491470458134029e+00, 0.1252334085114692e+00),
];

const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-01, 0.9931285991850949e+00),
    (0.4060142980038694e-01, 0.9639719272779138e+00),
    (0.6267204833410906e-01, 0.9122344282513259e+00),
    (0.8327674157670475e-01, 0.8391169718222188e+00),
    (0.1019301198172404e+00, 0.7463319064601508e+00),
    (0.1181945319615184e+00, 0.6360536807265150e+00),
    (0.1316886384491766e+00, 0.5108670019508271e+00),
    (0.1420961093183821e+00, 0.3737060887154196e+00),
    (0.1491729864726037e+00, 0.2277858511416451e+00),
    (0.1527533871307259e+00, 0.7652652113349733e-01),
];

fn rule(abs_rho: f64) -> &'static [(f64, f64)] {
    if abs_rho < 0.3 {
        &GL6
    } else if abs_rho < 0.75 {
        &GL12
    } else {
        &GL20
    }
}

/// `P(X ≤ a, Y ≤ b)` for a standard bivariate normal pair with correlation
/// `rho`. `a` and `b` may be infinite.
pub fn bvn_cdf(a: f64, b: f64, rho: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&rho) {
        return Err(Error::Domain {
            what: "bivariate normal correlation must lie in [-1, 1]",
            value: rho,
        });
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::Domain {
            what: "bivariate normal limits must not be NaN",
            value: f64::NAN,
        });
    }
    Ok(bvn_lower(a, b, rho))
}

/// Same as [`bvn_cdf`] without argument checks.
#[inline]
pub(crate) fn bvn_lower(a: f64, b: f64, rho: f64) -> f64 {
    upper_orthant(-a, -b, rho).clamp(0.0, 1.0)
}

// P(X > h, Y > k).
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::INFINITY || k == f64::INFINITY {
        return 0.0;
    }
    if h == f64::NEG_INFINITY {
        return if k == f64::NEG_INFINITY { 1.0 } else { phi(-k) };
    }
    if k == f64::NEG_INFINITY {
        return phi(-h);
    }
    if r == 0.0 {
        return phi(-h) * phi(-k);
    }

    let quad = rule(r.abs());
    let mut hk = h * k;
    let mut k = k;

    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = 0.5 * r.asin();
        let mut sum = 0.0;
        for &(w, x) in quad {
            for t in [1.0 - x, 1.0 + x] {
                let sn = (asr * t).sin();
                sum += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return sum * asr / (2.0 * PI) + phi(-h) * phi(-k);
    }

    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let mut bvn = 0.0;
    if r.abs() < 1.0 {
        let a_s = (1.0 - r) * (1.0 + r);
        let mut a = a_s.sqrt();
        let b_s = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        let asr = -0.5 * (b_s / a_s + hk);
        if asr > -100.0 {
            bvn = a
                * asr.exp()
                * (1.0 - c * (b_s - a_s) * (1.0 - d * b_s / 5.0) / 3.0 + c * d * a_s * a_s / 5.0);
        }
        if hk > -100.0 {
            let b = b_s.sqrt();
            let sp = (2.0 * PI).sqrt() * phi(-b / a);
            bvn -= (-0.5 * hk).exp() * sp * b * (1.0 - c * b_s * (1.0 - d * b_s / 5.0) / 3.0);
        }
        a *= 0.5;
        let mut sum = 0.0;
        for &(w, x) in quad {
            for t in [1.0 - x, 1.0 + x] {
                let xs = (a * t) * (a * t);
                let asr = -0.5 * (b_s / xs + hk);
                if asr > -100.0 {
                    let sp = 1.0 + c * xs * (1.0 + d * xs);
                    let rs = (1.0 - xs).sqrt();
                    let ep = (-0.5 * hk * xs / ((1.0 + rs) * (1.0 + rs))).exp() / rs;
                    sum += w * asr.exp() * (sp - ep);
                }
            }
        }
        bvn = (a * sum - bvn) / (2.0 * PI);
    }

    if r > 0.0 {
        bvn + phi(-h.max(k))
    } else if h >= k {
        -bvn
    } else {
        let l = if h < 0.0 {
            phi(k) - phi(h)
        } else {
            phi(-h) - phi(-k)
        };
        l - bvn
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal::std_normal_pdf;

    // P(X ≤ a, Y ≤ b) = ∫_{-∞}^{a} φ(x) Φ((b − ρx)/√(1−ρ²)) dx, by composite
    // Simpson. Independent of the Plackett form used by the implementation.
    fn conditional_oracle(a: f64, b: f64, rho: f64) -> f64 {
        let lo = -12.0_f64;
        let hi = a.min(12.0);
        if hi <= lo {
            return 0.0;
        }
        let s = (1.0 - rho * rho).sqrt();
        let f = |x: f64| std_normal_pdf(x) * phi((b - rho * x) / s);
        let n = 40_000;
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn quadrant_examples() {
        assert!((bvn_cdf(0.0, 0.0, 0.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((bvn_cdf(0.0, 0.0, 1.0).unwrap() - 0.5).abs() < 1e-15);
        let third = bvn_cdf(0.0, 0.0, 0.5).unwrap();
        assert!((third - 1.0 / 3.0).abs() < 1e-12, "{third}");
    }

    #[test]
    fn orthant_identity() {
        for rho in [-0.999, -0.99, -0.93, -0.9, -0.5, -0.2, 0.0, 0.2, 0.5, 0.9, 0.93, 0.99, 0.999] {
            let expected = 0.25 + f64::asin(rho) / (2.0 * PI);
            let got = bvn_cdf(0.0, 0.0, rho).unwrap();
            assert!((got - expected).abs() < 1e-12, "rho={rho}: {got} vs {expected}");
        }
    }

    #[test]
    fn matches_conditional_integral_oracle() {
        let pts = [-2.5, -1.0, -0.3, 0.0, 0.4, 1.2, 2.7];
        for &rho in &[-0.98, -0.95, -0.8, -0.4, -0.1, 0.1, 0.35, 0.7, 0.9, 0.95, 0.98] {
            for &a in &pts {
                for &b in &pts {
                    let got = bvn_cdf(a, b, rho).unwrap();
                    let want = conditional_oracle(a, b, rho);
                    assert!(
                        (got - want).abs() < 1e-7,
                        "a={a} b={b} rho={rho}: {got} vs {want}"
                    );
                }
            }
        }
    }

    #[test]
    fn independence_factorises() {
        for a in [-1.3, 0.2, 2.0] {
            for b in [-0.7, 0.0, 1.1] {
                let got = bvn_cdf(a, b, 0.0).unwrap();
                assert!((got - phi(a) * phi(b)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn perfect_correlation_limits() {
        for (a, b) in [(-0.4, 0.9), (1.5, -0.2), (0.3, 0.3)] {
            assert!((bvn_cdf(a, b, 1.0).unwrap() - phi(a.min(b))).abs() < 1e-15);
            let anti = (phi(a) + phi(b) - 1.0).max(0.0);
            assert!((bvn_cdf(a, b, -1.0).unwrap() - anti).abs() < 1e-15);
        }
    }

    #[test]
    fn infinite_limits() {
        assert_eq!(bvn_cdf(f64::INFINITY, f64::INFINITY, 0.3).unwrap(), 1.0);
        assert_eq!(bvn_cdf(f64::NEG_INFINITY, 0.5, 0.3).unwrap(), 0.0);
        assert!((bvn_cdf(f64::INFINITY, 0.5, 0.3).unwrap() - phi(0.5)).abs() < 1e-15);
    }

    #[test]
    fn symmetric_and_monotone_on_grid() {
        let grid: Vec<f64> = (0..15).map(|i| -3.5 + 0.5 * i as f64).collect();
        let rhos: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        for &rho in &rhos {
            let rho = rho.clamp(-1.0, 1.0);
            for (ia, &a) in grid.iter().enumerate() {
                for (ib, &b) in grid.iter().enumerate() {
                    let v = bvn_cdf(a, b, rho).unwrap();
                    assert!((v - bvn_cdf(b, a, rho).unwrap()).abs() < 1e-15);
                    if ia > 0 {
                        assert!(v + 1e-15 >= bvn_cdf(grid[ia - 1], b, rho).unwrap());
                    }
                    if ib > 0 {
                        assert!(v + 1e-15 >= bvn_cdf(a, grid[ib - 1], rho).unwrap());
                    }
                }
            }
        }
        for &a in &grid {
            for &b in &grid {
                let mut prev = 0.0;
                for &rho in &rhos {
                    let v = bvn_cdf(a, b, rho.clamp(-1.0, 1.0)).unwrap();
                    assert!(v + 1e-12 >= prev, "a={a} b={b} rho={rho}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn rejects_out_of_range_rho() {
        assert!(bvn_cdf(0.0, 0.0, 1.0001).is_err());
        assert!(bvn_cdf(0.0, 0.0, f64::NAN).is_err());
    }
}
