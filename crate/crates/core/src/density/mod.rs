//! Truncated density estimators and their bandwidth / floor schedules.
//!
//! Two estimators share one evaluation interface: a kernel estimator for
//! continuous outputs and a relative-frequency estimator for discrete ones.
//! Both are clamped from below by a floor `tau`, which keeps logarithms of
//! the estimate finite.

mod discrete;
mod kernel;
mod sample;
mod schedule;

pub use discrete::DiscreteEstimate;
pub use kernel::KernelEstimate;
pub use sample::{Location, Sample, SpaceTag, Symbol};
pub use schedule::{
    default_bandwidth, default_floor, min_gamma, BandwidthMode, BandwidthRule, FloorRule, ScheduleMode,
};

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::statcore::Kernel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EstimatorKind {
    /// Truncated kernel density estimator.
    Tkde,
    /// Truncated discrete density estimator.
    Tdde,
}

/// A floor-truncated density estimate built from one sample. Immutable once
/// built.
#[derive(Clone, Debug)]
pub enum DensityEstimate {
    Kernel(KernelEstimate),
    Discrete(DiscreteEstimate),
}

impl DensityEstimate {
    pub fn kind(&self) -> EstimatorKind {
        match self {
            DensityEstimate::Kernel(_) => EstimatorKind::Tkde,
            DensityEstimate::Discrete(_) => EstimatorKind::Tdde,
        }
    }

    pub fn space(&self) -> SpaceTag {
        match self {
            DensityEstimate::Kernel(k) => SpaceTag::Continuous { dim: k.dim() },
            DensityEstimate::Discrete(_) => SpaceTag::Discrete,
        }
    }

    pub fn floor(&self) -> f64 {
        match self {
            DensityEstimate::Kernel(k) => k.floor(),
            DensityEstimate::Discrete(d) => d.floor(),
        }
    }

    pub fn sample_size(&self) -> usize {
        match self {
            DensityEstimate::Kernel(k) => k.sample_size(),
            DensityEstimate::Discrete(d) => d.sample_size(),
        }
    }

    pub fn bandwidth(&self) -> Option<f64> {
        match self {
            DensityEstimate::Kernel(k) => Some(k.bandwidth()),
            DensityEstimate::Discrete(_) => None,
        }
    }

    /// Estimate before truncation.
    pub fn raw(&self, at: &Location) -> Result<f64> {
        match (self, at) {
            (DensityEstimate::Kernel(k), Location::Real(t)) => k.raw(*t),
            (DensityEstimate::Discrete(d), Location::Symbol(s)) => Ok(d.frequency(*s)),
            _ => Err(AuditError::invalid(
                "evaluation point does not match the estimator's output space",
            )),
        }
    }

    /// Truncated estimate `max(raw, tau)`.
    pub fn eval(&self, at: &Location) -> Result<f64> {
        Ok(self.raw(at)?.max(self.floor()))
    }
}

/// Builds the truncated discrete estimator `max(count(t)/n, tau)`.
pub fn tdde_build(sample: &Sample, floor: f64) -> Result<DensityEstimate> {
    Ok(DensityEstimate::Discrete(DiscreteEstimate::new(sample, floor)?))
}

/// Builds the truncated kernel estimator
/// `max((n h^d)^-1 Σ K((t - X_i)/h), tau)`.
pub fn tkde_build(sample: &Sample, bandwidth: f64, kernel: Kernel, floor: f64) -> Result<DensityEstimate> {
    Ok(DensityEstimate::Kernel(KernelEstimate::new(
        sample, bandwidth, kernel, floor,
    )?))
}

pub(crate) fn check_floor(floor: f64) -> Result<()> {
    if floor >= 0.0 && floor.is_finite() {
        Ok(())
    } else {
        Err(AuditError::invalid(format!(
            "floor must be a finite non-negative number, got {floor}"
        )))
    }
}
