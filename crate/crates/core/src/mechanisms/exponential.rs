use super::laplace::check_lambda;
use super::{draw_n, Input, Mechanism};
use crate::density::{Location, Sample, SpaceTag};
use crate::error::{AuditError, Result};
use crate::statcore::AuditRng;

/// `ε(λ) = λ + ln(2 - e^{-2λ}) - ln(2 - e^{-λ})` for statistics in `[1, 2]`.
pub fn exponential_epsilon(lambda: f64) -> f64 {
    lambda + (2.0 - (-2.0 * lambda).exp()).ln() - (2.0 - (-lambda).exp()).ln()
}

fn check_statistic(s: f64) -> Result<()> {
    if (1.0..=2.0).contains(&s) {
        Ok(())
    } else {
        Err(AuditError::invalid(format!(
            "exponential mechanism statistic must lie in [1, 2], got {s}"
        )))
    }
}

/// Normalising constant of `exp(-λ|s-t|)` over `t >= 0`.
fn normaliser(s: f64, lambda: f64) -> f64 {
    (2.0 - (-lambda * s).exp()) / lambda
}

fn inverse_cdf(u: f64, s: f64, lambda: f64) -> f64 {
    let z = normaliser(s, lambda);
    let left_mass = (1.0 - (-lambda * s).exp()) / (lambda * z);
    if u < left_mass {
        // CDF on [0, s]: (e^{-λ(s-t)} - e^{-λs}) / (λZ)
        (s + (u * lambda * z + (-lambda * s).exp()).ln() / lambda).max(0.0)
    } else {
        // survival on [s, ∞): e^{-λ(t-s)} / (λZ)
        s - ((1.0 - u) * lambda * z).ln() / lambda
    }
}

/// Draws from the density proportional to `exp(-λ|s - t|)` on `t >= 0`.
pub fn exponential_mech(s: f64, lambda: f64, rng: &mut AuditRng) -> Result<f64> {
    check_statistic(s)?;
    check_lambda(lambda)?;
    Ok(inverse_cdf(rng.open_unit(), s, lambda))
}

#[derive(Clone, Debug)]
pub struct ExponentialMechanism {
    pub lambda: f64,
}

impl ExponentialMechanism {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(ExponentialMechanism { lambda })
    }

    /// Mechanism whose exact privacy level is `epsilon0`.
    pub fn for_epsilon(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0) || !epsilon0.is_finite() {
            return Err(AuditError::invalid("privacy level must be positive"));
        }
        // ε(λ) is increasing with λ <= ε(λ) <= 2λ.
        let (mut lo, mut hi) = (0.5 * epsilon0, epsilon0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if exponential_epsilon(mid) < epsilon0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        ExponentialMechanism::new(0.5 * (lo + hi))
    }

    pub fn cdf(&self, s: f64, t: f64) -> f64 {
        let l = self.lambda;
        let z = normaliser(s, l);
        if t <= 0.0 {
            0.0
        } else if t <= s {
            ((-l * (s - t)).exp() - (-l * s).exp()) / (l * z)
        } else {
            1.0 - (-l * (t - s)).exp() / (l * z)
        }
    }
}

impl Mechanism for ExponentialMechanism {
    fn name(&self) -> &str {
        "exponential"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Continuous { dim: 1 }
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let s = input.as_scalar()?;
        check_statistic(s)?;
        Sample::scalar(draw_n(n, || inverse_cdf(rng.open_unit(), s, self.lambda))?)
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(exponential_epsilon(self.lambda))
    }

    /// The loss is linear in `t` between the two statistics and constant
    /// outside, so its supremum sits on the left plateau:
    /// `λ|s - s'| + |ln Z(s') - ln Z(s)|`.
    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        let (s, sp) = (x.as_scalar().ok()?, x_prime.as_scalar().ok()?);
        let l = self.lambda;
        Some(l * (s - sp).abs() + (normaliser(sp, l).ln() - normaliser(s, l).ln()).abs())
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let s = input.as_scalar().ok()?;
        let Location::Real(t) = *at else { return None };
        if t < 0.0 {
            return Some(0.0);
        }
        Some((-self.lambda * (s - t).abs()).exp() / normaliser(s, self.lambda))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_epsilon() {
        let want = 0.75 + (2.0 - (-1.5f64).exp()).ln() - (2.0 - (-0.75f64).exp()).ln();
        assert!((exponential_epsilon(0.75) - want).abs() < 1e-15);
        // 0.75 + ln(1.776870) - ln(1.527633)
        assert!((exponential_epsilon(0.75) - 0.901_133_5).abs() < 1e-6);
        let m = ExponentialMechanism::for_epsilon(1.5).unwrap();
        assert!((m.true_epsilon().unwrap() - 1.5).abs() < 1e-12);
        let pe = m.pair_epsilon(&Input::Scalar(1.0), &Input::Scalar(2.0)).unwrap();
        assert!((pe - 1.5).abs() < 1e-12);
    }

    #[test]
    fn outputs_non_negative_and_cdf_inverts() {
        let m = ExponentialMechanism::new(0.9).unwrap();
        let mut rng = AuditRng::new(8);
        for s in [1.0, 1.4, 2.0] {
            for _ in 0..10_000 {
                let t = exponential_mech(s, m.lambda, &mut rng).unwrap();
                assert!(t >= 0.0);
            }
            for u in [1e-9, 0.1, 0.3, 0.5, 0.77, 0.999] {
                let t = inverse_cdf(u, s, m.lambda);
                assert!((m.cdf(s, t) - u).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_out_of_domain() {
        let mut rng = AuditRng::new(0);
        assert!(exponential_mech(0.5, 1.0, &mut rng).is_err());
        assert!(exponential_mech(1.5, 0.0, &mut rng).is_err());
    }
}
