use serde::{Deserialize, Serialize};

use super::{Sample, SpaceTag};
use crate::error::{AuditError, Result};

/// Whether parameters are chosen for point estimation or for a confidence
/// bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleMode {
    Estimation,
    Inference,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BandwidthMode {
    /// `h = c_h n^{-1/(2β+d)}`.
    Estimation,
    /// Undersmoothed `h = c_h N^{-1/(2β+d) - γ}`; requires `γ > ν / (6(1+ν))`.
    Inference { nu: f64, gamma: f64 },
}

/// Smallest admissible undersmoothing exponent for a given `ν`.
pub fn min_gamma(nu: f64) -> f64 {
    nu / (6.0 * (1.0 + nu))
}

/// Rule-of-thumb bandwidth: `c_h = scale · σ̂`, with σ̂ the sample standard
/// deviation, times the rate in the sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandwidthRule {
    pub scale: f64,
    /// Hölder smoothness assumed for the output densities.
    pub beta: f64,
}

impl Default for BandwidthRule {
    fn default() -> Self {
        BandwidthRule { scale: 1.06, beta: 1.0 }
    }
}

impl BandwidthRule {
    /// Bandwidth for one sample.
    pub fn bandwidth(&self, sample: &Sample, mode: BandwidthMode) -> Result<f64> {
        self.pooled(&[sample], mode)
    }

    /// Common bandwidth for several samples of the same size: the spread is
    /// averaged over the samples.
    pub fn pooled(&self, samples: &[&Sample], mode: BandwidthMode) -> Result<f64> {
        if samples.is_empty() {
            return Err(AuditError::invalid("no samples given"));
        }
        if !(self.scale > 0.0) || !(self.beta > 0.0) {
            return Err(AuditError::invalid("bandwidth scale and smoothness must be positive"));
        }
        let mut dim = 0;
        let mut spread = 0.0;
        for s in samples {
            let SpaceTag::Continuous { dim: d } = s.space() else {
                return Err(AuditError::invalid("bandwidths apply to continuous samples only"));
            };
            dim = d;
            spread += s.spread()?;
        }
        spread /= samples.len() as f64;
        if !(spread > 0.0) {
            return Err(AuditError::invalid("sample has zero spread; no density to smooth"));
        }
        let n = samples.iter().map(|s| s.len()).min().unwrap_or(1) as f64;
        let base = 1.0 / (2.0 * self.beta + dim as f64);
        let exponent = match mode {
            BandwidthMode::Estimation => base,
            BandwidthMode::Inference { nu, gamma } => {
                if !(nu >= 0.0) {
                    return Err(AuditError::invalid(format!("nu must be non-negative, got {nu}")));
                }
                if !(gamma > min_gamma(nu)) {
                    return Err(AuditError::invalid(format!(
                        "gamma = {gamma} does not exceed nu/(6(1+nu)) = {:.5}",
                        min_gamma(nu)
                    )));
                }
                base + gamma
            }
        };
        Ok(self.scale * spread * n.powf(-exponent))
    }
}

/// [`BandwidthRule::default`] applied to one sample.
pub fn default_bandwidth(sample: &Sample, mode: BandwidthMode) -> Result<f64> {
    BandwidthRule::default().bandwidth(sample, mode)
}

/// How the estimation floor depends on the sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FloorRule {
    /// `coarse` below `fine_from` observations, `fine` from there on.
    Fixed { coarse: f64, fine: f64, fine_from: usize },
    /// `ln(n)/√n` (discrete) or `ln(n) n^{-β/(2β+d)}` (continuous, β = 1),
    /// scaled to equal `level` at `reference_n`.
    Rate { level: f64, reference_n: usize },
}

impl Default for FloorRule {
    fn default() -> Self {
        FloorRule::Fixed {
            coarse: 1e-3,
            fine: 1e-4,
            fine_from: 100_000,
        }
    }
}

impl FloorRule {
    pub fn floor(&self, n: usize, space: SpaceTag, mode: ScheduleMode) -> f64 {
        if mode == ScheduleMode::Inference {
            return 0.0;
        }
        match *self {
            FloorRule::Fixed {
                coarse,
                fine,
                fine_from,
            } => {
                if n >= fine_from {
                    fine
                } else {
                    coarse
                }
            }
            FloorRule::Rate { level, reference_n } => {
                let rate = |m: usize| {
                    let m = m.max(2) as f64;
                    match space {
                        SpaceTag::Discrete => m.ln() / m.sqrt(),
                        SpaceTag::Continuous { dim } => m.ln() * m.powf(-1.0 / (2.0 + dim as f64)),
                    }
                };
                level * rate(n) / rate(reference_n)
            }
        }
    }
}

/// [`FloorRule::default`]: `1e-3` for the smaller sample sizes, `1e-4` from
/// `10^5` observations on, and no floor for inference.
pub fn default_floor(n: usize, space: SpaceTag, mode: ScheduleMode) -> f64 {
    FloorRule::default().floor(n, space, mode)
}
