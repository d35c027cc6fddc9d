use super::{draw_n, Input, Mechanism};
use crate::density::{Location, Sample, SpaceTag};
use crate::error::{AuditError, Result};
use crate::statcore::{laplace_inverse_cdf, AuditRng};

/// Publishes `s + Lap(1/λ)`.
pub fn laplace_mech(s: f64, lambda: f64, rng: &mut AuditRng) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(s + laplace_inverse_cdf(rng.open_unit(), 1.0 / lambda))
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(AuditError::invalid(format!(
            "noise parameter must be positive, got {lambda}"
        )))
    }
}

/// Laplace mechanism on a statistic in `[0, 1]`; `λ`-differentially private.
#[derive(Clone, Debug)]
pub struct LaplaceMechanism {
    pub lambda: f64,
}

impl LaplaceMechanism {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(LaplaceMechanism { lambda })
    }
}

impl Mechanism for LaplaceMechanism {
    fn name(&self) -> &str {
        "laplace"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Continuous { dim: 1 }
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let s = input.as_scalar()?;
        let b = 1.0 / self.lambda;
        Sample::scalar(draw_n(n, || s + laplace_inverse_cdf(rng.open_unit(), b))?)
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(self.lambda)
    }

    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        Some(self.lambda * (x.as_scalar().ok()? - x_prime.as_scalar().ok()?).abs())
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let (s, Location::Real(t)) = (input.as_scalar().ok()?, at) else {
            return None;
        };
        Some(0.5 * self.lambda * (-self.lambda * (t - s).abs()).exp())
    }
}
