//! The mechanism zoo: black-box samplers with analytic privacy oracles.
//!
//! Auditing code only ever calls [`Mechanism::sample`]; the oracle methods
//! (`true_epsilon`, `density`, `analytic_loss`) exist so that estimates can
//! be checked against known answers.

mod exponential;
mod input;
mod laplace;
mod noisy_max;
mod simple;
mod svt;
mod zoo;

pub use exponential::{exponential_epsilon, exponential_mech, ExponentialMechanism};
pub use input::{Adjacency, AdjacentPair, Input};
pub use laplace::{laplace_mech, LaplaceMechanism};
pub use noisy_max::{continuous_noisy_max, report_noisy_max, ContinuousNoisyMax, ReportNoisyMax};
pub use simple::{gaussian_mech, randomized_response, GaussianMechanism, RandomizedResponse};
pub use svt::{decode_sequence, encode_sequence, svt, SparseVector, SvtVariant};
pub use zoo::{catalog, true_epsilon, CatalogEntry, MechanismKind, MechanismSpec, ParamSchema};

use crate::density::{Location, Sample, SpaceTag, Symbol};
use crate::error::Result;
use crate::statcore::AuditRng;

/// A randomized algorithm under audit.
///
/// Implementors must be deterministic given the random stream, and every
/// output must lie in [`Mechanism::output_space`].
pub trait Mechanism: Send + Sync {
    fn name(&self) -> &str;

    fn output_space(&self) -> SpaceTag;

    /// Draws `n` i.i.d. outputs of the mechanism run on `input`.
    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample>;

    /// Finite output alphabet, when the mechanism declares one.
    fn alphabet(&self) -> Option<Vec<Symbol>> {
        None
    }

    /// Global privacy parameter, `+inf` for mechanisms that are not private
    /// at all, `None` when no closed form is known.
    fn true_epsilon(&self) -> Option<f64> {
        None
    }

    /// Data-specific privacy violation `sup_t |ln f_x(t) - ln f_x'(t)|`.
    fn pair_epsilon(&self, _x: &Input, _x_prime: &Input) -> Option<f64> {
        None
    }

    /// Output density (or probability mass) at `at` under `input`.
    fn density(&self, _input: &Input, _at: &Location) -> Option<f64> {
        None
    }

    /// Pointwise loss `|ln f_x(t) - ln f_x'(t)|`, with `∞ - ∞ := 0`.
    fn analytic_loss(&self, x: &Input, x_prime: &Input, at: &Location) -> Option<f64> {
        let a = self.density(x, at)?;
        let b = self.density(x_prime, at)?;
        Some(log_ratio(a, b))
    }
}

impl<M: Mechanism + ?Sized> Mechanism for Box<M> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn output_space(&self) -> SpaceTag {
        (**self).output_space()
    }
    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        (**self).sample(input, n, rng)
    }
    fn alphabet(&self) -> Option<Vec<Symbol>> {
        (**self).alphabet()
    }
    fn true_epsilon(&self) -> Option<f64> {
        (**self).true_epsilon()
    }
    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        (**self).pair_epsilon(x, x_prime)
    }
    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        (**self).density(input, at)
    }
    fn analytic_loss(&self, x: &Input, x_prime: &Input, at: &Location) -> Option<f64> {
        (**self).analytic_loss(x, x_prime, at)
    }
}

/// `|ln a - ln b|` for non-negative `a`, `b`; zero when both vanish and
/// infinite when exactly one does.
pub fn log_ratio(a: f64, b: f64) -> f64 {
    match (a > 0.0, b > 0.0) {
        (true, true) => (a.ln() - b.ln()).abs(),
        (false, false) => 0.0,
        _ => f64::INFINITY,
    }
}

pub(crate) fn draw_n<F>(n: usize, mut f: F) -> Result<Vec<f64>>
where
    F: FnMut() -> f64,
{
    Ok((0..n).map(|_| f()).collect())
}
