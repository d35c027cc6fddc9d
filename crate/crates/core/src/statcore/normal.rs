use std::f64::consts::{PI, SQRT_2};

use crate::error::{AuditError, Result};

/// Distribution function of the standard normal law.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

// Acklam's rational approximation, relative error ~1.2e-9 before refinement.
// Coefficients are kept as published.
#[allow(clippy::excessive_precision)]
const A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_690e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const P_LOW: f64 = 0.02425;

fn acklam(p: f64) -> f64 {
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// Quantile function `Φ⁻¹(p)` of the standard normal law.
///
/// Rational first guess followed by one Halley step against `erfc`, which
/// brings the error down to a few ulps over the whole open unit interval.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(AuditError::invalid(format!(
            "normal quantile requires p in (0, 1), got {p}"
        )));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    // Work in the lower half so that 1 - p never loses precision.
    let (lower, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let x = acklam(lower);
    let e = std_normal_cdf(x) - lower;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    let refined = x - u / (1.0 + 0.5 * x * u);
    Ok(sign * refined)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: composite Simpson integration of the normal
    /// density from 0, inverted by bisection.
    fn quad_cdf(x: f64) -> f64 {
        let m = 20_000;
        let h = x / m as f64;
        let phi = |s: f64| (-0.5 * s * s).exp() / (2.0 * PI).sqrt();
        let mut acc = phi(0.0) + phi(x);
        for i in 1..m {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * phi(i as f64 * h);
        }
        0.5 + acc * h / 3.0
    }

    fn bisect_quantile(p: f64) -> f64 {
        let (mut lo, mut hi) = (-9.0, 9.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if quad_cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn frozen_values() {
        // Values computed with `bisect_quantile` above.
        assert_eq!(std_normal_quantile(0.5).unwrap(), 0.0);
        assert!((std_normal_quantile(0.05).unwrap() + 1.644_853_6).abs() < 1e-7);
        assert!((std_normal_quantile(0.975).unwrap() - 1.959_964_0).abs() < 1e-7);
    }

    #[test]
    fn agrees_with_bisection_oracle() {
        for p in [1e-6, 0.001, 0.01, 0.02425, 0.05, 0.2, 0.4, 0.6, 0.9, 0.975, 0.999] {
            let got = std_normal_quantile(p).unwrap();
            let want = bisect_quantile(p);
            assert!((got - want).abs() < 1e-8, "p={p}: {got} vs {want}");
        }
    }

    #[test]
    fn antisymmetric() {
        for p in [0.001, 0.05, 0.3, 0.49] {
            let a = std_normal_quantile(p).unwrap();
            let b = std_normal_quantile(1.0 - p).unwrap();
            assert!((a + b).abs() < 1e-12);
        }
    }

    #[test]
    fn inverts_the_cdf_on_a_grid() {
        for i in 0..100 {
            let x = -4.0 + 8.0 * i as f64 / 99.0;
            let back = std_normal_quantile(quad_cdf(x)).unwrap();
            assert!((back - x).abs() < 1e-6, "x={x} back={back}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(std_normal_quantile(p).is_err());
        }
    }
}
