use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::density::{BandwidthRule, FloorRule, SpaceTag, Symbol};
use crate::error::{AuditError, Result};
use crate::loss::{EstimationSettings, EvalGrid};
use crate::mechanisms::{Adjacency, AdjacentPair, Input, Mechanism, MechanismKind, MechanismSpec};
use crate::mpl::{nu, InferenceSettings, MplSettings};
use crate::patterns::{PairPreset, PatternSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Audit,
    Cdf,
    Mse,
    DataCentric,
    LossProfile,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Audit => "audit",
            Mode::Cdf => "cdf",
            Mode::Mse => "mse",
            Mode::DataCentric => "data-centric",
            Mode::LossProfile => "loss-profile",
        }
    }

    /// Substream key of the mode, so that different experiments with one
    /// master seed never share samples.
    pub(crate) fn stream_key(self) -> u64 {
        match self {
            Mode::Audit => 10,
            // both are repeated audits; a one-pair neighbourhood reproduces
            // the cdf run exactly
            Mode::Cdf | Mode::DataCentric => 11,
            Mode::Mse => 12,
            Mode::LossProfile => 14,
        }
    }

    fn uses_mpl(self) -> bool {
        matches!(self, Mode::Audit | Mode::Cdf | Mode::DataCentric)
    }
}

/// Explicit pair as written in a config file; `adjacency` defaults to
/// `query` for discrete mechanisms and `statistic` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairEntry {
    pub x: Input,
    pub x_prime: Input,
    #[serde(default)]
    pub adjacency: Option<Adjacency>,
    #[serde(default)]
    pub name: Option<String>,
}

/// The file format: one flat JSON object. Every key is optional except
/// `mechanism`.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub mechanism: Option<String>,
    pub epsilon0: Option<f64>,
    pub lambda: Option<f64>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    #[serde(alias = "T")]
    pub threshold: Option<f64>,
    #[serde(alias = "M")]
    pub max_positive: Option<usize>,
    pub sigma: Option<f64>,
    pub mode: Option<Mode>,
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub big_n: Option<usize>,
    pub tau: Option<f64>,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub repetitions: Option<usize>,
    pub preset: Option<PairPreset>,
    pub pairs: Option<Vec<PairEntry>>,
    pub pair_index: Option<usize>,
    pub c_lo: Option<f64>,
    pub c_hi: Option<f64>,
    pub grid_points: Option<usize>,
    pub alphabet: Option<Vec<Symbol>>,
    pub gamma: Option<f64>,
    pub bandwidth_scale: Option<f64>,
    pub inference_bandwidth_scale: Option<f64>,
    pub beta: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub timing: Option<bool>,
}

/// A validated experiment description with every default filled in.
#[derive(Clone, Debug, Serialize)]
pub struct AuditConfig {
    pub mechanism: MechanismSpec,
    pub mode: Mode,
    pub pairs: PatternSet,
    /// Pair used by the single-pair modes (`mse`, `loss-profile`).
    pub pair_index: usize,
    pub n: usize,
    #[serde(rename = "N")]
    pub big_n: usize,
    pub tau: f64,
    pub alpha: f64,
    pub seed: u64,
    pub repetitions: usize,
    pub grid: EvalGrid,
    pub settings: MplSettings,
    pub n_list: Vec<usize>,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub timing: bool,
}

fn parse_error(e: serde_json::Error) -> AuditError {
    AuditError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| cfg_err("config", format!("cannot read {}: {e}", path.display())))
}

/// Reads and validates a config file.
pub fn load_config(path: &Path) -> Result<AuditConfig> {
    load_config_with(Some(path), Map::new())
}

/// Reads `path` (if any), lets `overrides` replace top-level keys, and
/// validates the result.
pub fn load_config_with(path: Option<&Path>, overrides: Map<String, Value>) -> Result<AuditConfig> {
    let mut doc = match path {
        Some(p) => {
            let text = read_config(p)?;
            match serde_json::from_str::<Value>(&text).map_err(parse_error)? {
                Value::Object(m) => m,
                _ => {
                    return Err(AuditError::Parse {
                        line: 1,
                        column: 1,
                        message: "config must be a JSON object".into(),
                    })
                }
            }
        }
        None => Map::new(),
    };
    doc.extend(overrides);
    let raw: RawConfig = serde_json::from_value(Value::Object(doc)).map_err(|e| AuditError::Parse {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    raw.validate()
}

/// Loads a config for a fixed mode: a `mode` key in the file must agree
/// with `mode`, and is filled in when absent.
pub fn load_config_for(mode: Mode, path: Option<&Path>, mut overrides: Map<String, Value>) -> Result<AuditConfig> {
    let config = {
        overrides.insert("mode".into(), serde_json::to_value(mode).expect("modes serialize"));
        if let Some(p) = path {
            let text = read_config(p)?;
            if let Ok(Value::Object(m)) = serde_json::from_str::<Value>(&text) {
                if let Some(v) = m.get("mode") {
                    if v.as_str() != Some(mode.name()) {
                        return Err(cfg_err(
                            "mode",
                            format!("file asks for {v}, command is `{}`", mode.name()),
                        ));
                    }
                }
            }
        }
        load_config_with(path, overrides)?
    };
    Ok(config)
}

/// Parses config text directly.
pub fn parse_config(text: &str) -> Result<AuditConfig> {
    serde_json::from_str::<RawConfig>(text).map_err(parse_error)?.validate()
}

fn cfg_err(field: &str, message: impl Into<String>) -> AuditError {
    AuditError::config(field, message)
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(cfg_err(field, format!("must be a positive number, got {v}")))
    }
}

impl RawConfig {
    pub fn validate(self) -> Result<AuditConfig> {
        let name = self
            .mechanism
            .as_deref()
            .ok_or_else(|| cfg_err("mechanism", "required"))?;
        let kind = MechanismKind::from_name(name)?;
        let is_svt = kind.svt_variant().is_some();
        let mode = self.mode.unwrap_or(Mode::Audit);

        let mechanism = MechanismSpec {
            kind,
            epsilon0: self.epsilon0.map(|v| positive("epsilon0", v)).transpose()?,
            lambda: self.lambda.map(|v| positive("lambda", v)).transpose()?,
            k: self.k,
            d: self.d,
            threshold: self.threshold.or(is_svt.then_some(1.0)),
            max_positive: self.max_positive.or(is_svt.then_some(1)),
            sigma: self.sigma.map(|v| positive("sigma", v)).transpose()?,
        };
        let built = mechanism.build().map_err(|e| match e {
            AuditError::InvalidArgument(m) => cfg_err("mechanism", m),
            other => other,
        })?;

        let (n_default, big_n_default) = if is_svt { (100_000, 500_000) } else { (20_000, 50_000) };
        let n = self.n.unwrap_or(n_default);
        let big_n = self.big_n.unwrap_or(big_n_default);
        if n < crate::loss::MIN_DPL_SAMPLE {
            return Err(cfg_err(
                "n",
                format!("must be at least {}", crate::loss::MIN_DPL_SAMPLE),
            ));
        }
        if mode.uses_mpl() && big_n <= n {
            return Err(cfg_err("N", format!("must exceed n = {n}")));
        }

        let alpha = self.alpha.unwrap_or(0.05);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(cfg_err("alpha", format!("must lie in (0, 1), got {alpha}")));
        }
        let repetitions = self.repetitions.unwrap_or(match mode {
            Mode::Audit | Mode::LossProfile => 1,
            Mode::Mse => 200,
            Mode::Cdf | Mode::DataCentric => 1000,
        });
        if repetitions == 0 {
            return Err(cfg_err("repetitions", "must be at least 1"));
        }

        let floor = match self.tau {
            Some(t) if t >= 0.0 && t.is_finite() => FloorRule::Fixed {
                coarse: t,
                fine: t,
                fine_from: usize::MAX,
            },
            Some(t) => return Err(cfg_err("tau", format!("must be non-negative, got {t}"))),
            None => FloorRule::default(),
        };
        let space = built.output_space();
        let tau = floor.floor(n, space, crate::density::ScheduleMode::Estimation);

        let beta = positive("beta", self.beta.unwrap_or(1.0))?;
        let est_scale = positive("bandwidth_scale", self.bandwidth_scale.unwrap_or(1.06))?;
        let inf_scale = positive(
            "inference_bandwidth_scale",
            self.inference_bandwidth_scale.unwrap_or(est_scale),
        )?;
        let gamma = self.gamma.unwrap_or(0.02);
        if mode.uses_mpl() && matches!(space, SpaceTag::Continuous { .. }) {
            let floor_gamma = crate::density::min_gamma(nu(n, big_n));
            if !(gamma > floor_gamma) {
                return Err(cfg_err(
                    "gamma",
                    format!("must exceed nu/(6(1+nu)) = {floor_gamma:.5} for n = {n}, N = {big_n}"),
                ));
            }
        }
        let settings = MplSettings {
            estimation: EstimationSettings {
                bandwidth: BandwidthRule { scale: est_scale, beta },
                floor,
            },
            inference: InferenceSettings {
                gamma,
                bandwidth: BandwidthRule { scale: inf_scale, beta },
            },
        };

        let grid = match space {
            SpaceTag::Discrete => {
                let symbols = self.alphabet.clone().or_else(|| built.alphabet()).unwrap_or_default();
                EvalGrid::symbols(symbols).map_err(|e| cfg_err("alphabet", e.to_string()))?
            }
            SpaceTag::Continuous { .. } => {
                let (lo, hi) = if kind == MechanismKind::Exponential {
                    (0.0, 2.0)
                } else {
                    (-1.0, 1.0)
                };
                EvalGrid::interval(
                    self.c_lo.unwrap_or(lo),
                    self.c_hi.unwrap_or(hi),
                    self.grid_points.unwrap_or(2001),
                )
                .map_err(|e| cfg_err("grid_points", e.to_string()))?
            }
        };

        let pairs = self.pair_set(kind, mode, &mechanism)?;
        for p in &pairs.pairs {
            if p.pair.x.len() != mechanism.input_len() || p.pair.x_prime.len() != mechanism.input_len() {
                return Err(cfg_err(
                    "pairs",
                    format!(
                        "pair `{}` does not have inputs of length {}",
                        p.name,
                        mechanism.input_len()
                    ),
                ));
            }
        }
        if mode == Mode::DataCentric {
            match self.preset {
                // explicit pair lists are taken as a user-supplied neighbourhood
                Some(p) if p.is_neighborhood() => {}
                None => {}
                _ => {
                    return Err(cfg_err(
                        "preset",
                        "data-centric mode needs a neighbourhood preset (binary_neighborhood or cube_grid)",
                    ))
                }
            }
        }
        let pair_index = match self.pair_index {
            Some(i) if i < pairs.len() => i,
            Some(i) => {
                return Err(cfg_err(
                    "pair_index",
                    format!("only {} pairs available, got {i}", pairs.len()),
                ))
            }
            // shift presets list pairs by increasing distance; use the widest
            None if pairs.name.ends_with("_shift") => pairs.len() - 1,
            None => 0,
        };

        let n_list = self.n_list.clone().unwrap_or_else(|| vec![1_000, 5_000, 20_000]);
        if mode == Mode::Mse {
            if n_list.is_empty() {
                return Err(cfg_err("n_list", "must list at least one sample size"));
            }
            if let Some(&bad) = n_list.iter().find(|&&m| m < crate::loss::MIN_DPL_SAMPLE) {
                return Err(cfg_err("n_list", format!("sample size {bad} is below the minimum")));
            }
        }
        if self.workers == Some(0) {
            return Err(cfg_err("workers", "must be at least 1"));
        }

        Ok(AuditConfig {
            mechanism,
            mode,
            pairs,
            pair_index,
            n,
            big_n,
            tau,
            alpha,
            seed: self.seed.unwrap_or(1),
            repetitions,
            grid,
            settings,
            n_list,
            output: self.output,
            workers: self.workers,
            timing: self.timing.unwrap_or(false),
        })
    }

    fn pair_set(&self, kind: MechanismKind, mode: Mode, spec: &MechanismSpec) -> Result<PatternSet> {
        if let Some(entries) = &self.pairs {
            if self.preset.is_some() {
                return Err(cfg_err("pairs", "give either `pairs` or `preset`, not both"));
            }
            if entries.is_empty() {
                return Err(cfg_err("pairs", "must contain at least one pair"));
            }
            let mut set = PatternSet::new("explicit");
            for (i, e) in entries.iter().enumerate() {
                let adjacency = e.adjacency.unwrap_or(match kind {
                    MechanismKind::RandomizedResponse => Adjacency::Hamming,
                    k if k.is_discrete() => Adjacency::Query,
                    _ => Adjacency::Statistic,
                });
                let pair = AdjacentPair::new(e.x.clone(), e.x_prime.clone(), adjacency)
                    .map_err(|err| cfg_err("pairs", format!("pair {i}: {err}")))?;
                set.push(e.name.clone().unwrap_or_else(|| format!("pair_{i}")), pair);
            }
            return Ok(set);
        }
        let preset = self.preset.unwrap_or(match (mode, kind) {
            (Mode::DataCentric, MechanismKind::ContinuousNoisyMax) => PairPreset::CubeGrid,
            (Mode::DataCentric, _) => PairPreset::BinaryNeighborhood,
            _ => PairPreset::default_for(kind),
        });
        preset
            .generate(spec.input_len(), kind)
            .map_err(|e| cfg_err("preset", e.to_string()))
    }
}

impl AuditConfig {
    /// Minimal config for a mechanism at a privacy level, everything else
    /// defaulted.
    pub fn for_mechanism(kind: MechanismKind, epsilon0: f64, mode: Mode) -> Result<Self> {
        RawConfig {
            mechanism: Some(kind.name().to_string()),
            epsilon0: Some(epsilon0),
            mode: Some(mode),
            ..RawConfig::default()
        }
        .validate()
    }

    pub fn build_mechanism(&self) -> Result<Box<dyn Mechanism>> {
        self.mechanism.build()
    }

    /// Snapshot written into reports.
    pub fn snapshot(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("configs always serialize");
        if let Value::Object(m) = &mut v {
            // the pair list is reported per pair already
            m.insert("pairs".into(), Value::String(self.pairs.name.clone()));
            // where results go and how many threads compute them never
            // changes them
            m.remove("output");
            m.remove("workers");
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplace_defaults() {
        let c = parse_config(r#"{"mechanism": "laplace", "epsilon0": 1.5, "mode": "audit"}"#).unwrap();
        assert_eq!((c.n, c.big_n, c.tau, c.alpha), (20_000, 50_000, 1e-3, 0.05));
        assert_eq!(c.grid, EvalGrid::interval(-1.0, 1.0, 2001).unwrap());
        assert_eq!(c.pairs.len(), 10);
    }

    #[test]
    fn svt_defaults() {
        let c = parse_config(r#"{"mechanism": "svt2", "epsilon0": 0.7}"#).unwrap();
        assert_eq!((c.n, c.big_n, c.tau), (100_000, 500_000, 1e-4));
        assert_eq!(c.mechanism.input_len(), 10);
        let m = c.build_mechanism().unwrap();
        assert_eq!(m.alphabet().unwrap().len(), 11);
    }

    #[test]
    fn validation_errors_name_the_field() {
        let err = parse_config(r#"{"mechanism": "laplace", "epsilon0": 1.5, "alpha": 1.5}"#).unwrap_err();
        assert!(
            matches!(err, AuditError::Config { ref field, .. } if field == "alpha"),
            "{err}"
        );
        let err = parse_config(r#"{"mechanism": "laplace", "epsilon0": 1.5, "N": 100}"#).unwrap_err();
        assert!(matches!(err, AuditError::Config { ref field, .. } if field == "N"));
        let err = parse_config(r#"{"mechanism": "nope", "epsilon0": 1.5}"#).unwrap_err();
        assert!(matches!(err, AuditError::UnknownMechanism(_)));
        let err = parse_config("{\n  \"mechanism\": \"laplace\",\n  oops\n}").unwrap_err();
        assert!(matches!(err, AuditError::Parse { line: 3, .. }), "{err}");
        assert!(parse_config(r#"{"mechanism": "laplace", "epsilon0": 1.5, "colour": 1}"#).is_err());
    }

    #[test]
    fn explicit_pairs_and_overrides() {
        let c = parse_config(
            r#"{"mechanism": "report_noisy_max", "epsilon0": 1.5, "pairs": [{"x": [1,1,1,1,1,1], "x_prime": [2,0,0,0,0,0]}]}"#,
        )
        .unwrap();
        assert_eq!(c.pairs.len(), 1);
        assert!(parse_config(
            r#"{"mechanism": "report_noisy_max", "epsilon0": 1.5, "pairs": [{"x": [1,1,1,1,1,1], "x_prime": [3,0,0,0,0,0]}]}"#
        )
        .is_err());
        let mut o = Map::new();
        o.insert("n".into(), Value::from(5000));
        o.insert("N".into(), Value::from(10_000));
        o.insert("mechanism".into(), Value::from("laplace"));
        o.insert("epsilon0".into(), Value::from(0.7));
        let c = load_config_with(None, o).unwrap();
        assert_eq!(c.n, 5000);
    }

    #[test]
    fn data_centric_requires_neighbourhood() {
        let c = parse_config(r#"{"mechanism": "report_noisy_max", "epsilon0": 1.5, "mode": "data-centric"}"#).unwrap();
        assert_eq!(c.pairs.len(), 63);
        let c =
            parse_config(r#"{"mechanism": "continuous_noisy_max", "epsilon0": 1.5, "mode": "data-centric"}"#).unwrap();
        assert_eq!(c.pairs.len(), 26);
        assert!(parse_config(
            r#"{"mechanism": "report_noisy_max", "epsilon0": 1.5, "mode": "data-centric", "preset": "table1"}"#
        )
        .is_err());
    }
}
