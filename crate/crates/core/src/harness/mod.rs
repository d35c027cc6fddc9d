//! Config-driven experiment drivers: single audits, empirical CDFs of the
//! lower bound over repeated audits, estimator MSE over sample sizes,
//! data-centric audits over a neighbourhood, and loss-profile tables.
//!
//! Every repetition draws from its own substream of the master seed, keyed
//! by `(mode, repetition)`; inside an audit the pairs and stages split
//! further. Results are therefore independent of the worker count.

mod config;

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{
    load_config, load_config_for, load_config_with, parse_config, AuditConfig, Mode, PairEntry, RawConfig,
};

use crate::error::{AuditError, Result};
use crate::loss::{dpl_with_streams, LossProfile};
use crate::mechanisms::Mechanism;
use crate::mpl::{mpl, AuditReport};
use crate::statcore::AuditRng;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "PRIVLOSS_WORKERS";

fn require_mode(config: &AuditConfig, allowed: &[Mode]) -> Result<()> {
    if allowed.contains(&config.mode) {
        Ok(())
    } else {
        Err(AuditError::config(
            "mode",
            format!(
                "expected {}, config has `{}`",
                allowed.iter().map(|m| m.name()).collect::<Vec<_>>().join(" or "),
                config.mode.name()
            ),
        ))
    }
}

/// Runs `f` on a pool sized by the config, then by [`WORKERS_ENV`], then
/// by rayon's default.
pub fn with_workers<T: Send>(config: &AuditConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let env = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0);
    match config.workers.or(env) {
        None => Ok(f()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| AuditError::invalid(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn master(config: &AuditConfig) -> AuditRng {
    AuditRng::new(config.seed).split(config.mode.stream_key())
}

fn one_audit(config: &AuditConfig, mechanism: &dyn Mechanism, repetition: usize) -> Result<AuditReport> {
    let rng = master(config).split(repetition as u64);
    let mut report = mpl(
        mechanism,
        &config.pairs,
        config.n,
        config.big_n,
        &config.grid,
        config.alpha,
        &config.settings,
        &rng,
    )?;
    report.seed = config.seed;
    Ok(report)
}

/// One MPL run.
pub fn run_audit(config: &AuditConfig) -> Result<AuditReport> {
    require_mode(config, &[Mode::Audit])?;
    let mechanism = config.build_mechanism()?;
    let mut report = with_workers(config, || one_audit(config, mechanism.as_ref(), 0))??;
    report.config = config.snapshot();
    Ok(report)
}

/// Report as written to disk: `runtime_ms` is zeroed unless `timing` is on,
/// so identical configs give identical files.
pub fn report_json(config: &AuditConfig, report: &AuditReport) -> String {
    let mut r = report.clone();
    if !config.timing {
        r.runtime_ms = 0;
    }
    r.to_json() + "\n"
}

/// Empirical distribution of the lower bound over repeated audits.
#[derive(Clone, Debug, Serialize)]
pub struct CdfTable {
    pub mechanism: String,
    /// Sorted lower bounds.
    pub lbs: Vec<f64>,
    /// `levels[i] = (i + 1) / R`.
    pub levels: Vec<f64>,
    pub epsilon0: Option<f64>,
    pub true_epsilon: Option<f64>,
    pub alpha: f64,
    /// Runs whose second-stage density vanished at the chosen location.
    pub unstable_runs: usize,
    #[serde(skip)]
    pub reports: Vec<AuditReport>,
}

impl CdfTable {
    pub fn from_reports(
        mechanism: &str,
        reports: Vec<AuditReport>,
        epsilon0: Option<f64>,
        true_epsilon: Option<f64>,
        alpha: f64,
    ) -> Self {
        let mut lbs: Vec<f64> = reports.iter().map(|r| r.lb).collect();
        // stable: equal values keep run order
        lbs.sort_by(f64::total_cmp);
        let r = lbs.len() as f64;
        let levels = (1..=lbs.len()).map(|i| i as f64 / r).collect();
        CdfTable {
            mechanism: mechanism.to_string(),
            lbs,
            levels,
            epsilon0,
            true_epsilon,
            alpha,
            unstable_runs: reports.iter().filter(|r| r.unstable_location).count(),
            reports,
        }
    }

    pub fn repetitions(&self) -> usize {
        self.lbs.len()
    }

    /// Empirical `P(LB <= z)`.
    pub fn cdf_at(&self, z: f64) -> f64 {
        self.lbs.partition_point(|&v| v <= z) as f64 / self.lbs.len() as f64
    }

    /// Lower median, `lbs[(R - 1) / 2]`.
    pub fn median(&self) -> f64 {
        self.lbs[(self.lbs.len() - 1) / 2]
    }

    /// `# key=value` metadata line, header `lb,cdf_level`, one row per run.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "unknown".to_string(), |x| x.to_string());
        let mut out = format!(
            "# mechanism={},epsilon0={},true_epsilon={},alpha={},repetitions={}\nlb,cdf_level\n",
            self.mechanism,
            opt(self.epsilon0),
            opt(self.true_epsilon),
            self.alpha,
            self.repetitions()
        );
        for (lb, level) in self.lbs.iter().zip(&self.levels) {
            writeln!(out, "{lb},{level}").unwrap();
        }
        out
    }
}

fn repeated_audits(config: &AuditConfig) -> Result<CdfTable> {
    let mechanism = config.build_mechanism()?;
    let reports = with_workers(config, || {
        (0..config.repetitions)
            .into_par_iter()
            .map(|r| one_audit(config, mechanism.as_ref(), r))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(CdfTable::from_reports(
        mechanism.name(),
        reports,
        config.mechanism.epsilon0,
        mechanism.true_epsilon(),
        config.alpha,
    ))
}

/// `R` independent audits.
pub fn run_cdf(config: &AuditConfig) -> Result<CdfTable> {
    require_mode(config, &[Mode::Cdf])?;
    repeated_audits(config)
}

/// Repeated audits over the neighbourhood of a fixed input; the bound then
/// targets the data-centric level `ε_x`.
pub fn run_data_centric(config: &AuditConfig) -> Result<CdfTable> {
    require_mode(config, &[Mode::DataCentric])?;
    repeated_audits(config)
}

#[derive(Clone, Debug, Serialize)]
pub struct MseRow {
    pub n: usize,
    pub mse: f64,
    pub rmse: f64,
    pub mean_abs_error: f64,
    pub repetitions: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MseTable {
    pub mechanism: String,
    pub pair: String,
    pub true_epsilon: f64,
    pub rows: Vec<MseRow>,
}

impl MseTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# mechanism={},pair={},true_epsilon={}\nn,mse,rmse,mean_abs_error,repetitions\n",
            self.mechanism, self.pair, self.true_epsilon
        );
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.n, r.mse, r.rmse, r.mean_abs_error, r.repetitions
            )
            .unwrap();
        }
        out
    }
}

/// Squared error of the data-specific estimate against the analytic value,
/// averaged over `R` seeds for each sample size in `n_list`.
pub fn run_mse(config: &AuditConfig) -> Result<MseTable> {
    require_mode(config, &[Mode::Mse])?;
    let mechanism = config.build_mechanism()?;
    let named = &config.pairs.pairs[config.pair_index];
    let pair = &named.pair;
    let truth = mechanism.pair_epsilon(&pair.x, &pair.x_prime).ok_or_else(|| {
        AuditError::invalid(format!(
            "no analytic privacy violation known for `{}` on pair {}",
            mechanism.name(),
            named.name
        ))
    })?;
    let base = master(config);
    let rows = with_workers(config, || {
        config
            .n_list
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let errors = (0..config.repetitions)
                    .into_par_iter()
                    .map(|r| {
                        let rng = base.split_path(&[i as u64, r as u64]);
                        let p = dpl_with_streams(
                            mechanism.as_ref(),
                            pair,
                            n,
                            &config.grid,
                            &config.settings.estimation,
                            &mut rng.split(0),
                            &mut rng.split(1),
                        )?;
                        Ok(p.epsilon_hat - truth)
                    })
                    .collect::<Result<Vec<f64>>>()?;
                let m = errors.len() as f64;
                let mse = errors.iter().map(|e| e * e).sum::<f64>() / m;
                Ok(MseRow {
                    n,
                    mse,
                    rmse: mse.sqrt(),
                    mean_abs_error: errors.iter().map(|e| e.abs()).sum::<f64>() / m,
                    repetitions: errors.len(),
                })
            })
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(MseTable {
        mechanism: mechanism.name().to_string(),
        pair: named.name.clone(),
        true_epsilon: truth,
        rows,
    })
}

/// One data-specific loss profile plus the analytic loss where known.
#[derive(Clone, Debug)]
pub struct LossTable {
    pub profile: LossProfile,
    pub analytic: Option<Vec<f64>>,
}

impl LossTable {
    pub fn to_csv(&self) -> String {
        self.profile.to_csv(self.analytic.as_deref())
    }
}

pub fn emit_loss_profile(config: &AuditConfig) -> Result<LossTable> {
    require_mode(config, &[Mode::LossProfile])?;
    let mechanism = config.build_mechanism()?;
    let pair = &config.pairs.pairs[config.pair_index].pair;
    let rng = master(config);
    let profile = dpl_with_streams(
        mechanism.as_ref(),
        pair,
        config.n,
        &config.grid,
        &config.settings.estimation,
        &mut rng.split(0),
        &mut rng.split(1),
    )?;
    let analytic = profile
        .grid
        .points()
        .map(|t| mechanism.analytic_loss(&pair.x, &pair.x_prime, &t))
        .collect::<Option<Vec<f64>>>();
    Ok(LossTable { profile, analytic })
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_output(path: &Path, text: &str) -> Result<()> {
    let io = |source| AuditError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, text).map_err(io)
}

/// Runs whatever the config's mode asks for and returns the serialized
/// output (JSON for audits, CSV otherwise).
pub fn run(config: &AuditConfig) -> Result<String> {
    Ok(match config.mode {
        Mode::Audit => report_json(config, &run_audit(config)?),
        Mode::Cdf => run_cdf(config)?.to_csv(),
        Mode::DataCentric => run_data_centric(config)?.to_csv(),
        Mode::Mse => run_mse(config)?.to_csv(),
        Mode::LossProfile => emit_loss_profile(config)?.to_csv(),
    })
}
