use rand_distr::{Distribution, StandardNormal};

use super::AuditRng;
use crate::error::{AuditError, Result};

/// Inverse distribution function of the centred Laplace law with scale `b`.
#[inline]
pub fn laplace_inverse_cdf(u: f64, b: f64) -> f64 {
    if u < 0.5 {
        b * (2.0 * u).ln()
    } else {
        -b * (2.0 * (1.0 - u)).ln()
    }
}

/// One draw from the density `exp(-|t|/b) / 2b`.
pub fn sample_laplace(b: f64, rng: &mut AuditRng) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(AuditError::invalid(format!("Laplace scale must be positive, got {b}")));
    }
    Ok(laplace_inverse_cdf(rng.open_unit(), b))
}

/// One draw from `N(mean, sd^2)`.
pub fn sample_gaussian(mean: f64, sd: f64, rng: &mut AuditRng) -> Result<f64> {
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(AuditError::invalid(format!(
            "standard deviation must be positive, got {sd}"
        )));
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok(mean + sd * z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_maps_to_zero() {
        assert_eq!(laplace_inverse_cdf(0.5, 2.0), 0.0);
    }

    #[test]
    fn rejects_bad_scale() {
        let mut r = AuditRng::new(0);
        assert!(sample_laplace(0.0, &mut r).is_err());
        assert!(sample_laplace(-1.0, &mut r).is_err());
        assert!(sample_gaussian(0.0, 0.0, &mut r).is_err());
    }

    #[test]
    fn laplace_moments() {
        let mut r = AuditRng::new(2024);
        let mut xs: Vec<f64> = (0..1_000_000).map(|_| sample_laplace(1.0, &mut r).unwrap()).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        xs.sort_by(f64::total_cmp);
        let median = 0.5 * (xs[499_999] + xs[500_000]);
        assert!(median.abs() < 0.01, "median {median}");
        assert!((var - 2.0).abs() < 0.05, "variance {var}");
    }
}
