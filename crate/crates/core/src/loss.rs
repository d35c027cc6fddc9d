//! The empirical privacy-loss function `ℓ̂(t) = |ln f̂_x(t) - ln f̂_x'(t)|`,
//! its maximisation over a bounded evaluation set, and the data-specific
//! estimate built from two fresh samples.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::density::{
    tdde_build, tkde_build, BandwidthMode, BandwidthRule, DensityEstimate, FloorRule, Location, Sample, ScheduleMode,
    SpaceTag, Symbol,
};
use crate::error::{AuditError, Result};
use crate::mechanisms::{log_ratio, AdjacentPair, Mechanism};
use crate::statcore::{AuditRng, Kernel};

/// The set `C` over which the loss is maximised.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EvalGrid {
    /// `points` equally spaced values from `lo` to `hi`, both included.
    Interval { lo: f64, hi: f64, points: usize },
    /// Explicit symbols in canonical (ascending) order.
    Symbols { symbols: Vec<Symbol> },
}

impl EvalGrid {
    pub fn interval(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(AuditError::invalid(format!(
                "grid needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        if points < 2 {
            return Err(AuditError::invalid("grid needs at least two points"));
        }
        Ok(EvalGrid::Interval { lo, hi, points })
    }

    /// Symbols are sorted; duplicates are rejected.
    pub fn symbols(mut symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(AuditError::invalid("symbol grid is empty"));
        }
        symbols.sort_unstable();
        if symbols.windows(2).any(|w| w[0] == w[1]) {
            return Err(AuditError::invalid("symbol grid has duplicates"));
        }
        Ok(EvalGrid::Symbols { symbols })
    }

    pub fn space(&self) -> SpaceTag {
        match self {
            EvalGrid::Interval { .. } => SpaceTag::Continuous { dim: 1 },
            EvalGrid::Symbols { .. } => SpaceTag::Discrete,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            EvalGrid::Interval { points, .. } => *points,
            EvalGrid::Symbols { symbols } => symbols.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn step(&self) -> Option<f64> {
        match *self {
            EvalGrid::Interval { lo, hi, points } => Some((hi - lo) / (points - 1) as f64),
            EvalGrid::Symbols { .. } => None,
        }
    }

    pub fn point(&self, i: usize) -> Location {
        match *self {
            EvalGrid::Interval { lo, hi, points } => {
                let m = (points - 1) as f64;
                Location::Real((lo * (m - i as f64) + hi * i as f64) / m)
            }
            EvalGrid::Symbols { ref symbols } => Location::Symbol(symbols[i]),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Location> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// A symbol grid extended by every symbol observed in `samples`.
    fn with_observed(&self, samples: &[&Sample]) -> Result<EvalGrid> {
        match self {
            EvalGrid::Interval { .. } => Ok(self.clone()),
            EvalGrid::Symbols { symbols } => {
                let mut all = symbols.clone();
                for s in samples {
                    if let Sample::Discrete(v) = s {
                        all.extend_from_slice(v);
                    }
                }
                all.sort_unstable();
                all.dedup();
                EvalGrid::symbols(all)
            }
        }
    }
}

fn same_space(a: &DensityEstimate, b: &DensityEstimate) -> Result<()> {
    if a.space() != b.space() {
        return Err(AuditError::invalid("density estimates live on different output spaces"));
    }
    Ok(())
}

/// `ℓ̂(t)`; `+inf` when exactly one (untruncated, floor 0) estimate vanishes
/// and `0` when both do.
pub fn empirical_loss_at(fx: &DensityEstimate, fxp: &DensityEstimate, t: &Location) -> Result<f64> {
    same_space(fx, fxp)?;
    Ok(log_ratio(fx.eval(t)?, fxp.eval(t)?))
}

/// `ℓ̂` tabulated over a grid together with its maximiser.
#[derive(Clone, Debug)]
pub struct LossProfile {
    pub grid: EvalGrid,
    pub values: Vec<f64>,
    /// Index of the first grid point attaining the maximum.
    pub argmax: usize,
    pub t_hat: Location,
    pub epsilon_hat: f64,
    pub fx: DensityEstimate,
    pub fx_prime: DensityEstimate,
}

impl LossProfile {
    /// CSV with columns `t,loss` and, when given, an `analytic` column.
    pub fn to_csv(&self, analytic: Option<&[f64]>) -> String {
        let mut out = String::from(if analytic.is_some() {
            "t,loss,analytic\n"
        } else {
            "t,loss\n"
        });
        for (i, (t, v)) in self.grid.points().zip(&self.values).enumerate() {
            write!(out, "{t},{v}").unwrap();
            if let Some(a) = analytic {
                write!(out, ",{}", a[i]).unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Evaluates a pair of densities on the whole grid, truncated values.
fn tabulate(f: &DensityEstimate, grid: &EvalGrid) -> Result<Vec<f64>> {
    match (f, grid) {
        (DensityEstimate::Kernel(k), EvalGrid::Interval { lo, points, .. }) if k.dim() == 1 => {
            let step = grid.step().expect("interval grid");
            let mut raw = k.raw_on_uniform_grid(*lo, step, *points)?;
            let floor = k.floor();
            raw.iter_mut().for_each(|v| *v = v.max(floor));
            Ok(raw)
        }
        _ => grid.points().map(|t| f.eval(&t)).collect(),
    }
}

/// Tabulates `ℓ̂` on `grid`; ties in the maximum go to the first grid point.
pub fn loss_profile(fx: &DensityEstimate, fx_prime: &DensityEstimate, grid: &EvalGrid) -> Result<LossProfile> {
    same_space(fx, fx_prime)?;
    if grid.space() != fx.space() {
        return Err(AuditError::invalid("grid does not match the estimators' output space"));
    }
    let a = tabulate(fx, grid)?;
    let b = tabulate(fx_prime, grid)?;
    let values: Vec<f64> = a.iter().zip(&b).map(|(&u, &v)| log_ratio(u, v)).collect();
    let mut argmax = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[argmax] {
            argmax = i;
        }
    }
    Ok(LossProfile {
        t_hat: grid.point(argmax),
        epsilon_hat: values[argmax],
        grid: grid.clone(),
        values,
        argmax,
        fx: fx.clone(),
        fx_prime: fx_prime.clone(),
    })
}

/// Bandwidth and floor schedules for point estimation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EstimationSettings {
    pub bandwidth: BandwidthRule,
    pub floor: FloorRule,
}

impl EstimationSettings {
    /// Estimation-mode density of one sample, with its own bandwidth.
    pub fn estimate(&self, sample: &Sample) -> Result<DensityEstimate> {
        let floor = self.floor.floor(sample.len(), sample.space(), ScheduleMode::Estimation);
        match sample.space() {
            SpaceTag::Discrete => tdde_build(sample, floor),
            SpaceTag::Continuous { dim } => {
                let h = self.bandwidth.bandwidth(sample, BandwidthMode::Estimation)?;
                tkde_build(sample, h, Kernel::gaussian(dim)?, floor)
            }
        }
    }
}

pub const MIN_DPL_SAMPLE: usize = 100;

/// Data-specific estimate `(t̂, ε̂)`: `n` draws from each input, estimation
/// densities, and the maximum of `ℓ̂` over `grid`. Samples for `x` and `x'`
/// come from substreams 0 and 1 of `rng`.
pub fn dpl(
    mechanism: &dyn Mechanism,
    pair: &AdjacentPair,
    n: usize,
    grid: &EvalGrid,
    rng: &AuditRng,
) -> Result<LossProfile> {
    dpl_with_streams(
        mechanism,
        pair,
        n,
        grid,
        &EstimationSettings::default(),
        &mut rng.split(0),
        &mut rng.split(1),
    )
}

/// [`dpl`] with explicit settings and sample streams.
pub fn dpl_with_streams(
    mechanism: &dyn Mechanism,
    pair: &AdjacentPair,
    n: usize,
    grid: &EvalGrid,
    settings: &EstimationSettings,
    x_rng: &mut AuditRng,
    y_rng: &mut AuditRng,
) -> Result<LossProfile> {
    if n < MIN_DPL_SAMPLE {
        return Err(AuditError::invalid(format!(
            "sample size must be at least {MIN_DPL_SAMPLE}, got {n}"
        )));
    }
    let xs = mechanism.sample(&pair.x, n, x_rng)?;
    let ys = mechanism.sample(&pair.x_prime, n, y_rng)?;
    let fx = settings.estimate(&xs)?;
    let fy = settings.estimate(&ys)?;
    let grid = grid.with_observed(&[&xs, &ys])?;
    loss_profile(&fx, &fy, &grid)
}
