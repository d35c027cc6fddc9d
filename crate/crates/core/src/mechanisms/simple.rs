use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use super::{draw_n, Input, Mechanism};
use crate::density::{Location, Sample, SpaceTag, Symbol};
use crate::error::{AuditError, Result};
use crate::statcore::{sample_gaussian, AuditRng};

fn truthful_probability(epsilon0: f64) -> f64 {
    1.0 / (1.0 + (-epsilon0).exp())
}

/// Reports `bit` with probability `e^ε₀ / (1 + e^ε₀)` and flips it otherwise.
pub fn randomized_response(bit: bool, epsilon0: f64, rng: &mut AuditRng) -> Result<bool> {
    if !(epsilon0 > 0.0) {
        return Err(AuditError::invalid("privacy level must be positive"));
    }
    Ok(respond(bit, truthful_probability(epsilon0), rng))
}

fn respond(bit: bool, p: f64, rng: &mut AuditRng) -> bool {
    if rng.open_unit() < p {
        bit
    } else {
        !bit
    }
}

#[derive(Clone, Debug)]
pub struct RandomizedResponse {
    pub epsilon0: f64,
}

impl RandomizedResponse {
    pub fn new(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0) {
            return Err(AuditError::invalid("privacy level must be positive"));
        }
        Ok(RandomizedResponse { epsilon0 })
    }
}

impl Mechanism for RandomizedResponse {
    fn name(&self) -> &str {
        "randomized_response"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Discrete
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let bit = input.as_bit()?;
        let p = truthful_probability(self.epsilon0);
        Sample::discrete((0..n).map(|_| respond(bit, p, rng) as Symbol).collect())
    }

    fn alphabet(&self) -> Option<Vec<Symbol>> {
        Some(vec![0, 1])
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(self.epsilon0)
    }

    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        Some(if x.as_bit().ok()? == x_prime.as_bit().ok()? {
            0.0
        } else {
            self.epsilon0
        })
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let bit = input.as_bit().ok()?;
        let Location::Symbol(s) = *at else { return None };
        let p = truthful_probability(self.epsilon0);
        Some(match s {
            0 | 1 if (s == 1) == bit => p,
            0 | 1 => 1.0 - p,
            _ => 0.0,
        })
    }

    fn analytic_loss(&self, x: &Input, x_prime: &Input, at: &Location) -> Option<f64> {
        let Location::Symbol(s) = *at else { return None };
        if s > 1 {
            return Some(0.0);
        }
        self.pair_epsilon(x, x_prime)
    }
}

/// Publishes `s + N(0, σ²)`.
pub fn gaussian_mech(s: f64, sigma: f64, rng: &mut AuditRng) -> Result<f64> {
    sample_gaussian(s, sigma, rng)
}

/// Gaussian mechanism: its loss grows without bound in `t`, so it is not
/// `ε`-private for any finite `ε`.
#[derive(Clone, Debug)]
pub struct GaussianMechanism {
    pub sigma: f64,
}

impl GaussianMechanism {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(AuditError::invalid(format!("sigma must be positive, got {sigma}")));
        }
        Ok(GaussianMechanism { sigma })
    }

    /// Supremum of the loss for statistics `s`, `s'` over the interval `[lo, hi]`.
    pub fn truncated_pair_epsilon(&self, s: f64, s_prime: f64, lo: f64, hi: f64) -> f64 {
        let loss = |t: f64| ((t - s_prime).powi(2) - (t - s).powi(2)).abs() / (2.0 * self.sigma.powi(2));
        loss(lo).max(loss(hi))
    }
}

impl Mechanism for GaussianMechanism {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Continuous { dim: 1 }
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let s = input.as_scalar()?;
        Sample::scalar(draw_n(n, || {
            let z: f64 = StandardNormal.sample(&mut *rng);
            s + self.sigma * z
        })?)
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(f64::INFINITY)
    }

    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        let (s, sp) = (x.as_scalar().ok()?, x_prime.as_scalar().ok()?);
        Some(if s == sp { 0.0 } else { f64::INFINITY })
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let s = input.as_scalar().ok()?;
        let Location::Real(t) = *at else { return None };
        let z = (t - s) / self.sigma;
        Some((-0.5 * z * z).exp() / (self.sigma * (2.0 * PI).sqrt()))
    }

    /// `|(t - s')² - (t - s)²| / (2σ²)`, exact also where the densities underflow.
    fn analytic_loss(&self, x: &Input, x_prime: &Input, at: &Location) -> Option<f64> {
        let (s, sp) = (x.as_scalar().ok()?, x_prime.as_scalar().ok()?);
        let Location::Real(t) = *at else { return None };
        Some(((t - sp).powi(2) - (t - s).powi(2)).abs() / (2.0 * self.sigma.powi(2)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rr_loss_is_epsilon_at_both_symbols() {
        let m = RandomizedResponse::new(0.8).unwrap();
        let (x, y) = (Input::Scalar(0.0), Input::Scalar(1.0));
        for s in [0, 1] {
            let a = m.density(&x, &Location::Symbol(s)).unwrap();
            let b = m.density(&y, &Location::Symbol(s)).unwrap();
            assert!(((a.ln() - b.ln()).abs() - 0.8).abs() < 1e-12);
        }
    }

    #[test]
    fn rr_is_truthful_in_the_limit() {
        let mut rng = AuditRng::new(1);
        for _ in 0..1000 {
            assert!(randomized_response(true, 800.0, &mut rng).unwrap());
            assert!(!randomized_response(false, f64::INFINITY, &mut rng).unwrap());
        }
    }

    #[test]
    fn rr_relabelling_symmetry() {
        let m = RandomizedResponse::new(1.1).unwrap();
        let p0 = m.density(&Input::Scalar(0.0), &Location::Symbol(0)).unwrap();
        let p1 = m.density(&Input::Scalar(1.0), &Location::Symbol(1)).unwrap();
        assert_eq!(p0, p1);
    }

    #[test]
    fn gaussian_loss_is_unbounded() {
        let m = GaussianMechanism::new(1.0).unwrap();
        let (x, y) = (Input::Scalar(0.0), Input::Scalar(1.0));
        let at = |t: f64| m.analytic_loss(&x, &y, &Location::Real(t)).unwrap();
        assert!((at(3.0) - 2.5).abs() < 1e-12);
        assert!(at(1e4) > 1e3);
        assert!((m.truncated_pair_epsilon(0.0, 1.0, -1.0, 1.0) - 1.5).abs() < 1e-12);
        let m2 = GaussianMechanism::new(2.0).unwrap();
        assert!((m2.truncated_pair_epsilon(0.0, 1.0, -1.0, 1.0) - 1.5 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_mean() {
        let m = GaussianMechanism::new(2.0).unwrap();
        let mut rng = AuditRng::new(12);
        let Sample::Continuous { values, .. } = m.sample(&Input::Scalar(0.4), 1_000_000, &mut rng).unwrap() else {
            unreachable!()
        };
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        assert!((mean - 0.4).abs() < 0.01 * 2.0);
    }
}
