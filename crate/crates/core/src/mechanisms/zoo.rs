use serde::{Deserialize, Serialize};

use super::{
    ContinuousNoisyMax, ExponentialMechanism, GaussianMechanism, LaplaceMechanism, Mechanism, RandomizedResponse,
    ReportNoisyMax, SparseVector, SvtVariant,
};
use crate::error::{AuditError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MechanismKind {
    Laplace,
    ReportNoisyMax,
    ContinuousNoisyMax,
    Exponential,
    Svt2,
    Svt4,
    Svt5,
    Svt6,
    RandomizedResponse,
    Gaussian,
}

impl MechanismKind {
    pub const ALL: [MechanismKind; 10] = [
        MechanismKind::Laplace,
        MechanismKind::ReportNoisyMax,
        MechanismKind::ContinuousNoisyMax,
        MechanismKind::Exponential,
        MechanismKind::Svt2,
        MechanismKind::Svt4,
        MechanismKind::Svt5,
        MechanismKind::Svt6,
        MechanismKind::RandomizedResponse,
        MechanismKind::Gaussian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MechanismKind::Laplace => "laplace",
            MechanismKind::ReportNoisyMax => "report_noisy_max",
            MechanismKind::ContinuousNoisyMax => "continuous_noisy_max",
            MechanismKind::Exponential => "exponential",
            MechanismKind::Svt2 => "svt2",
            MechanismKind::Svt4 => "svt4",
            MechanismKind::Svt5 => "svt5",
            MechanismKind::Svt6 => "svt6",
            MechanismKind::RandomizedResponse => "randomized_response",
            MechanismKind::Gaussian => "gaussian",
        }
    }

    /// Accepts the canonical names plus hyphenated spellings.
    pub fn from_name(name: &str) -> Result<Self> {
        let norm = name.trim().to_ascii_lowercase().replace('-', "_");
        MechanismKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| AuditError::UnknownMechanism(name.to_string()))
    }

    pub fn svt_variant(self) -> Option<SvtVariant> {
        match self {
            MechanismKind::Svt2 => Some(SvtVariant::Svt2),
            MechanismKind::Svt4 => Some(SvtVariant::Svt4),
            MechanismKind::Svt5 => Some(SvtVariant::Svt5),
            MechanismKind::Svt6 => Some(SvtVariant::Svt6),
            _ => None,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, MechanismKind::ReportNoisyMax | MechanismKind::RandomizedResponse)
            || self.svt_variant().is_some()
    }
}

/// A mechanism name plus parameters. Unset parameters take the defaults
/// listed in [`catalog`]; `lambda`, where accepted, overrides `epsilon0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MechanismSpec {
    pub kind: MechanismKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_positive: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

pub const DEFAULT_NOISY_MAX_D: usize = 6;
pub const DEFAULT_CNM_K: usize = 3;
pub const DEFAULT_SVT_D: usize = 10;

impl MechanismSpec {
    pub fn new(kind: MechanismKind) -> Self {
        MechanismSpec {
            kind,
            epsilon0: None,
            lambda: None,
            k: None,
            d: None,
            threshold: None,
            max_positive: None,
            sigma: None,
        }
    }

    pub fn with_epsilon(kind: MechanismKind, epsilon0: f64) -> Self {
        MechanismSpec {
            epsilon0: Some(epsilon0),
            ..MechanismSpec::new(kind)
        }
    }

    fn epsilon(&self) -> Result<f64> {
        self.epsilon0
            .ok_or_else(|| AuditError::config("epsilon0", format!("required for mechanism `{}`", self.kind.name())))
    }

    /// Length of the query vector / statistic vector the mechanism consumes.
    pub fn input_len(&self) -> usize {
        match self.kind {
            MechanismKind::ReportNoisyMax => self.d.unwrap_or(DEFAULT_NOISY_MAX_D),
            MechanismKind::ContinuousNoisyMax => self.k.unwrap_or(DEFAULT_CNM_K),
            k if k.svt_variant().is_some() => self.d.unwrap_or(DEFAULT_SVT_D),
            _ => 1,
        }
    }

    pub fn build(&self) -> Result<Box<dyn Mechanism>> {
        Ok(match self.kind {
            MechanismKind::Laplace => {
                let lambda = match self.lambda {
                    Some(l) => l,
                    None => self.epsilon()?,
                };
                Box::new(LaplaceMechanism::new(lambda)?)
            }
            MechanismKind::ReportNoisyMax => Box::new(ReportNoisyMax::new(self.epsilon()?, self.input_len())?),
            MechanismKind::ContinuousNoisyMax => {
                let k = self.input_len();
                let lambda = match self.lambda {
                    Some(l) => l,
                    None => self.epsilon()? / k as f64,
                };
                Box::new(ContinuousNoisyMax::new(lambda, k)?)
            }
            MechanismKind::Exponential => match self.lambda {
                Some(l) => Box::new(ExponentialMechanism::new(l)?),
                None => Box::new(ExponentialMechanism::for_epsilon(self.epsilon()?)?),
            },
            MechanismKind::RandomizedResponse => Box::new(RandomizedResponse::new(self.epsilon()?)?),
            MechanismKind::Gaussian => Box::new(GaussianMechanism::new(self.sigma.unwrap_or(1.0))?),
            kind => {
                let variant = kind.svt_variant().expect("remaining kinds are SVT variants");
                Box::new(SparseVector::new(
                    variant,
                    self.epsilon()?,
                    self.threshold.unwrap_or(1.0),
                    self.max_positive.unwrap_or(1),
                    self.input_len(),
                )?)
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ParamSchema {
    pub name: &'static str,
    pub kind: &'static str,
    pub default: Option<String>,
    pub description: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub input: &'static str,
    pub output: &'static str,
    pub private: bool,
    pub params: Vec<ParamSchema>,
}

fn param(name: &'static str, kind: &'static str, default: Option<&str>, description: &'static str) -> ParamSchema {
    ParamSchema {
        name,
        kind,
        default: default.map(str::to_string),
        description,
    }
}

/// Every mechanism in the zoo with its parameter schema.
pub fn catalog() -> Vec<CatalogEntry> {
    let eps = || param("epsilon0", "positive real", None, "targeted privacy level");
    let svt = |kind: MechanismKind, private| CatalogEntry {
        name: kind.name(),
        input: "integer query vector of length d",
        output: "discrete: first positive index (M=1) or encoded answer sequence",
        private,
        params: vec![
            eps(),
            param("d", "integer >= 1", Some("10"), "number of queries"),
            param("threshold", "real", Some("1"), "threshold T"),
            param(
                "max_positive",
                "integer >= 1",
                Some("1"),
                "halt after M positive answers",
            ),
        ],
    };
    vec![
        CatalogEntry {
            name: "laplace",
            input: "real statistic in [0,1]",
            output: "continuous(1)",
            private: true,
            params: vec![
                eps(),
                param("lambda", "positive real", Some("epsilon0"), "inverse noise scale"),
            ],
        },
        CatalogEntry {
            name: "report_noisy_max",
            input: "integer query vector of length d",
            output: "discrete {1..d}",
            private: true,
            params: vec![eps(), param("d", "integer >= 2", Some("6"), "number of queries")],
        },
        CatalogEntry {
            name: "continuous_noisy_max",
            input: "real vector in [0,1]^k",
            output: "continuous(1)",
            private: true,
            params: vec![
                eps(),
                param("k", "integer >= 1", Some("3"), "vector length"),
                param("lambda", "positive real", Some("epsilon0/k"), "inverse noise scale"),
            ],
        },
        CatalogEntry {
            name: "exponential",
            input: "real statistic in [1,2]",
            output: "continuous(1) on [0,inf)",
            private: true,
            params: vec![
                eps(),
                param(
                    "lambda",
                    "positive real",
                    Some("solved from epsilon0"),
                    "rate of the exponential score",
                ),
            ],
        },
        svt(MechanismKind::Svt2, true),
        svt(MechanismKind::Svt4, true),
        svt(MechanismKind::Svt5, false),
        svt(MechanismKind::Svt6, false),
        CatalogEntry {
            name: "randomized_response",
            input: "bit {0,1}",
            output: "discrete {0,1}",
            private: true,
            params: vec![eps()],
        },
        CatalogEntry {
            name: "gaussian",
            input: "real statistic",
            output: "continuous(1)",
            private: false,
            params: vec![param("sigma", "positive real", Some("1"), "noise standard deviation")],
        },
    ]
}

/// Global privacy parameter of a zoo mechanism; `None` means unknown.
pub fn true_epsilon(mechanism: &dyn Mechanism) -> Option<f64> {
    mechanism.true_epsilon()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in MechanismKind::ALL {
            assert_eq!(MechanismKind::from_name(k.name()).unwrap(), k);
        }
        assert_eq!(
            MechanismKind::from_name("Report-Noisy-Max").unwrap(),
            MechanismKind::ReportNoisyMax
        );
        assert!(matches!(
            MechanismKind::from_name("svt3"),
            Err(AuditError::UnknownMechanism(_))
        ));
    }

    #[test]
    fn catalog_covers_every_kind() {
        let cat = catalog();
        for k in MechanismKind::ALL {
            assert!(cat.iter().any(|e| e.name == k.name()), "{}", k.name());
        }
    }

    #[test]
    fn built_mechanisms_report_their_level() {
        let eps = |kind, e| {
            let m = MechanismSpec::with_epsilon(kind, e).build().unwrap();
            assert_eq!(m.name(), kind.name());
            true_epsilon(m.as_ref()).unwrap()
        };
        assert_eq!(eps(MechanismKind::Laplace, 0.2), 0.2);
        assert!((eps(MechanismKind::ContinuousNoisyMax, 1.5) - 1.5).abs() < 1e-15);
        assert!((eps(MechanismKind::Exponential, 0.7) - 0.7).abs() < 1e-9);
        assert_eq!(eps(MechanismKind::Svt2, 0.7), 0.7);
        assert_eq!(eps(MechanismKind::Svt6, 0.7), f64::INFINITY);
        assert_eq!(eps(MechanismKind::Gaussian, 1.0), f64::INFINITY);
    }

    #[test]
    fn missing_epsilon_is_a_config_error() {
        let err = MechanismSpec::new(MechanismKind::Laplace).build().err().unwrap();
        assert!(err.is_config_error());
    }
}
