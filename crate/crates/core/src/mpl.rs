//! Maximum privacy loss: choose the most revealing pair and location from a
//! first round of estimates, then re-estimate the loss there on fresh
//! samples and attach an asymptotic lower confidence bound.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{
    tdde_build, tkde_build, BandwidthMode, BandwidthRule, DensityEstimate, Location, Sample, SpaceTag,
};
use crate::error::{AuditError, Result};
use crate::loss::{dpl_with_streams, EstimationSettings, EvalGrid};
use crate::mechanisms::{log_ratio, Input, Mechanism};
use crate::patterns::PatternSet;
use crate::statcore::{std_normal_quantile, AuditRng, Kernel};

/// Asymptotic variance of `ℓ̂(t)` up to the `c_N²` scaling: `1/f + 1/f' - 2`
/// for discrete outputs, `∫K² (1/f + 1/f')` for continuous ones.
pub fn sigma_hat_sq(fx: f64, fx_prime: f64, space: SpaceTag, kernel: Option<&Kernel>) -> Result<f64> {
    if !(fx > 0.0) || !(fx_prime > 0.0) {
        return Err(AuditError::invalid(format!(
            "density values must be positive, got {fx} and {fx_prime}"
        )));
    }
    let inv = 1.0 / fx + 1.0 / fx_prime;
    match space {
        SpaceTag::Discrete => {
            if fx > 1.0 || fx_prime > 1.0 {
                return Err(AuditError::invalid("probabilities cannot exceed one"));
            }
            Ok((inv - 2.0).max(0.0))
        }
        SpaceTag::Continuous { dim } => {
            let k = match kernel {
                Some(k) => *k,
                None => Kernel::gaussian(dim)?,
            };
            Ok(k.square_integral() * inv)
        }
    }
}

/// `√N` (discrete) or `√(N h^d)` (continuous).
pub fn c_norm(n: usize, bandwidth: Option<f64>, space: SpaceTag) -> Result<f64> {
    if n == 0 {
        return Err(AuditError::invalid("sample size must be positive"));
    }
    match space {
        SpaceTag::Discrete => Ok((n as f64).sqrt()),
        SpaceTag::Continuous { dim } => match bandwidth {
            Some(h) if h > 0.0 => Ok((n as f64 * h.powi(dim as i32)).sqrt()),
            _ => Err(AuditError::invalid(
                "continuous normalisation needs a positive bandwidth",
            )),
        },
    }
}

/// One-sided interval `[lb, ∞)` for the pointwise loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointwiseCi {
    pub loss: f64,
    pub sigma_hat: f64,
    pub c_n: f64,
    pub alpha: f64,
    pub lb: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(AuditError::invalid(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// `lb = ℓ̂ + Φ⁻¹(α) σ̂ / c_N` from two density values at the same point.
pub fn ci_from_values(
    fx: f64,
    fx_prime: f64,
    n: usize,
    bandwidth: Option<f64>,
    space: SpaceTag,
    alpha: f64,
) -> Result<PointwiseCi> {
    check_alpha(alpha)?;
    let sigma = sigma_hat_sq(fx, fx_prime, space, None)?.sqrt();
    let c_n = c_norm(n, bandwidth, space)?;
    let loss = log_ratio(fx, fx_prime);
    Ok(PointwiseCi {
        loss,
        sigma_hat: sigma,
        c_n,
        alpha,
        lb: loss + std_normal_quantile(alpha)? * sigma / c_n,
    })
}

/// Confidence interval for `ℓ(t)` from two estimates built on `n`
/// observations each (their common bandwidth enters `c_N`).
pub fn pointwise_ci(fx: &DensityEstimate, fx_prime: &DensityEstimate, t: &Location, alpha: f64) -> Result<PointwiseCi> {
    if fx.space() != fx_prime.space() {
        return Err(AuditError::invalid("density estimates live on different output spaces"));
    }
    let n = fx.sample_size().min(fx_prime.sample_size());
    ci_from_values(fx.eval(t)?, fx_prime.eval(t)?, n, fx.bandwidth(), fx.space(), alpha)
}

/// Bandwidth schedule for the second stage.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InferenceSettings {
    /// Undersmoothing exponent added to the estimation rate.
    pub gamma: f64,
    pub bandwidth: BandwidthRule,
}

impl Default for InferenceSettings {
    fn default() -> Self {
        InferenceSettings {
            gamma: 0.02,
            bandwidth: BandwidthRule::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MplSettings {
    pub estimation: EstimationSettings,
    pub inference: InferenceSettings,
}

/// `ν = ln(N/n) / ln(n)`.
pub fn nu(n: usize, big_n: usize) -> f64 {
    ((big_n as f64) / (n as f64)).ln() / (n as f64).ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEstimate {
    pub pair_id: usize,
    pub name: String,
    pub epsilon_hat: f64,
    pub t_hat: Location,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub mechanism: String,
    pub pairs: Vec<PairEstimate>,
    /// Index into `pairs` of the selected pair.
    pub selected: usize,
    pub x_max: Input,
    pub x_prime_max: Input,
    pub t_hat_max: Location,
    pub epsilon_hat_max: f64,
    /// Second-stage density values at `t_hat_max` (after any clamping).
    pub f_x_star: f64,
    pub f_x_prime_star: f64,
    pub loss_star: f64,
    pub sigma_hat: f64,
    pub c_n: f64,
    pub alpha: f64,
    pub lb: f64,
    pub bandwidth_max: Option<f64>,
    pub unstable_location: bool,
    pub n: usize,
    pub big_n: usize,
    pub seed: u64,
    pub runtime_ms: u64,
    #[serde(default)]
    pub config: serde_json::Value,
}

impl AuditReport {
    pub const CSV_HEADER: &'static str = "pair_id,epsilon_hat_max,t_hat_max,lb,alpha,seed,runtime_ms";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.pairs[self.selected].pair_id,
            self.epsilon_hat_max,
            self.t_hat_max,
            self.lb,
            self.alpha,
            self.seed,
            self.runtime_ms
        )
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

const STAGE_ONE: u64 = 1;
const STAGE_TWO: u64 = 2;

/// Full procedure with stage streams derived from `rng`.
#[allow(clippy::too_many_arguments)]
pub fn mpl(
    mechanism: &dyn Mechanism,
    pairs: &PatternSet,
    n: usize,
    big_n: usize,
    grid: &EvalGrid,
    alpha: f64,
    settings: &MplSettings,
    rng: &AuditRng,
) -> Result<AuditReport> {
    mpl_with_streams(
        mechanism,
        pairs,
        n,
        big_n,
        grid,
        alpha,
        settings,
        &rng.split(STAGE_ONE),
        &rng.split(STAGE_TWO),
    )
}

/// [`mpl`] with the two stages' streams given separately. Stage one draws
/// pair `b`'s samples from `stage_one.split(b)`.
#[allow(clippy::too_many_arguments)]
pub fn mpl_with_streams(
    mechanism: &dyn Mechanism,
    pairs: &PatternSet,
    n: usize,
    big_n: usize,
    grid: &EvalGrid,
    alpha: f64,
    settings: &MplSettings,
    stage_one: &AuditRng,
    stage_two: &AuditRng,
) -> Result<AuditReport> {
    let start = Instant::now();
    check_alpha(alpha)?;
    if pairs.is_empty() {
        return Err(AuditError::invalid("need at least one pair"));
    }
    if big_n <= n {
        return Err(AuditError::invalid(format!(
            "second-stage size N = {big_n} must exceed n = {n}"
        )));
    }

    let profiles: Vec<PairEstimate> = pairs
        .pairs
        .par_iter()
        .enumerate()
        .map(|(b, p)| {
            let r = stage_one.split(b as u64);
            let prof = dpl_with_streams(
                mechanism,
                &p.pair,
                n,
                grid,
                &settings.estimation,
                &mut r.split(0),
                &mut r.split(1),
            )?;
            Ok(PairEstimate {
                pair_id: p.id,
                name: p.name.clone(),
                epsilon_hat: prof.epsilon_hat,
                t_hat: prof.t_hat,
            })
        })
        .collect::<Result<_>>()?;

    let mut selected = 0;
    for (b, p) in profiles.iter().enumerate() {
        if p.epsilon_hat > profiles[selected].epsilon_hat {
            selected = b;
        }
    }
    let chosen = &pairs.pairs[selected].pair;
    let t_hat = profiles[selected].t_hat;

    let xs = mechanism.sample(&chosen.x, big_n, &mut stage_two.split(0))?;
    let ys = mechanism.sample(&chosen.x_prime, big_n, &mut stage_two.split(1))?;
    let (fx, fy, h) = stage_two_estimates(&xs, &ys, n, big_n, &settings.inference)?;
    let mut a = fx.raw(&t_hat)?;
    let mut b = fy.raw(&t_hat)?;
    let unstable = a <= 0.0 || b <= 0.0;
    if unstable {
        let clamp = 0.5 / big_n as f64;
        a = a.max(clamp);
        b = b.max(clamp);
    }
    let ci = ci_from_values(a, b, big_n, h, xs.space(), alpha)?;

    Ok(AuditReport {
        mechanism: mechanism.name().to_string(),
        epsilon_hat_max: profiles[selected].epsilon_hat,
        pairs: profiles,
        selected,
        x_max: chosen.x.clone(),
        x_prime_max: chosen.x_prime.clone(),
        t_hat_max: t_hat,
        f_x_star: a,
        f_x_prime_star: b,
        loss_star: ci.loss,
        sigma_hat: ci.sigma_hat,
        c_n: ci.c_n,
        alpha,
        lb: ci.lb,
        bandwidth_max: h,
        unstable_location: unstable,
        n,
        big_n,
        seed: stage_one.seed(),
        runtime_ms: start.elapsed().as_millis() as u64,
        config: serde_json::Value::Null,
    })
}

/// Untruncated second-stage estimates; continuous outputs share one
/// undersmoothed bandwidth computed from both samples.
fn stage_two_estimates(
    xs: &Sample,
    ys: &Sample,
    n: usize,
    big_n: usize,
    settings: &InferenceSettings,
) -> Result<(DensityEstimate, DensityEstimate, Option<f64>)> {
    match xs.space() {
        SpaceTag::Discrete => Ok((tdde_build(xs, 0.0)?, tdde_build(ys, 0.0)?, None)),
        SpaceTag::Continuous { dim } => {
            let mode = BandwidthMode::Inference {
                nu: nu(n, big_n),
                gamma: settings.gamma,
            };
            let h = settings.bandwidth.pooled(&[xs, ys], mode)?;
            let k = Kernel::gaussian(dim)?;
            Ok((tkde_build(xs, h, k, 0.0)?, tkde_build(ys, h, k, 0.0)?, Some(h)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variance_formulas() {
        assert_eq!(sigma_hat_sq(0.5, 0.5, SpaceTag::Discrete, None).unwrap(), 2.0);
        assert_eq!(sigma_hat_sq(1.0, 1.0, SpaceTag::Discrete, None).unwrap(), 0.0);
        let c = sigma_hat_sq(1.0, 1.0, SpaceTag::Continuous { dim: 1 }, None).unwrap();
        assert!((c - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert!(sigma_hat_sq(0.0, 0.5, SpaceTag::Discrete, None).is_err());
    }

    #[test]
    fn normalisers() {
        assert_eq!(c_norm(10_000, None, SpaceTag::Discrete).unwrap(), 100.0);
        let c = c_norm(10_000, Some(0.01), SpaceTag::Continuous { dim: 1 }).unwrap();
        assert!((c - 10.0).abs() < 1e-12);
        let c = c_norm(50_000, Some(0.0352), SpaceTag::Continuous { dim: 1 }).unwrap();
        assert!((c - 41.952).abs() < 1e-3);
        assert!(c_norm(10, None, SpaceTag::Continuous { dim: 1 }).is_err());
    }

    #[test]
    fn interval_arithmetic() {
        let ci = ci_from_values(0.5, 0.5, 10_000, None, SpaceTag::Discrete, 0.5).unwrap();
        assert_eq!(ci.lb, ci.loss);
        let e = std::f64::consts::E;
        // loss 1 with both probabilities near one half is not reachable, so
        // check the bound formula on its own terms
        let ci = ci_from_values(0.5, 0.5 / e, 10_000, None, SpaceTag::Discrete, 0.05).unwrap();
        let want = 1.0 - 1.644_853_6 * (2.0 + 2.0 * e - 2.0f64).sqrt() / 100.0;
        assert!((ci.lb - want).abs() < 1e-7);
        assert!(ci_from_values(0.5, 0.5, 100, None, SpaceTag::Discrete, 1.0).is_err());
    }

    #[test]
    fn nu_for_paper_sizes() {
        let v = nu(20_000, 50_000);
        assert!((v - (2.5f64).ln() / (20_000f64).ln()).abs() < 1e-15);
        assert!(0.02 > crate::density::min_gamma(v));
    }
}
