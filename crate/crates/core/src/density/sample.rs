use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

/// Output symbol of a discrete mechanism.
pub type Symbol = u64;

/// Output space of a mechanism or sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpaceTag {
    Discrete,
    Continuous { dim: usize },
}

/// A point of the output space at which a density or loss is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Location {
    Symbol(Symbol),
    Real(f64),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Symbol(s) => write!(f, "{s}"),
            Location::Real(t) => write!(f, "{t}"),
        }
    }
}

/// i.i.d. outputs of one mechanism run on one input.
#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    Discrete(Vec<Symbol>),
    /// Row-major `len x dim` matrix of outputs.
    Continuous {
        dim: usize,
        values: Vec<f64>,
    },
}

impl Sample {
    pub fn discrete(values: Vec<Symbol>) -> Result<Self> {
        if values.is_empty() {
            return Err(AuditError::invalid("sample is empty"));
        }
        Ok(Sample::Discrete(values))
    }

    pub fn scalar(values: Vec<f64>) -> Result<Self> {
        Sample::continuous(1, values)
    }

    pub fn continuous(dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(AuditError::invalid("sample dimension must be positive"));
        }
        if values.is_empty() {
            return Err(AuditError::invalid("sample is empty"));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(AuditError::invalid("sample length is not a multiple of its dimension"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(AuditError::invalid(format!("sample contains non-finite value {bad}")));
        }
        Ok(Sample::Continuous { dim, values })
    }

    pub fn len(&self) -> usize {
        match self {
            Sample::Discrete(v) => v.len(),
            Sample::Continuous { dim, values } => values.len() / dim,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn space(&self) -> SpaceTag {
        match self {
            Sample::Discrete(_) => SpaceTag::Discrete,
            Sample::Continuous { dim, .. } => SpaceTag::Continuous { dim: *dim },
        }
    }

    /// Mean over coordinates of the per-coordinate sample standard deviation.
    pub fn spread(&self) -> Result<f64> {
        let Sample::Continuous { dim, values } = self else {
            return Err(AuditError::invalid("spread is defined for continuous samples only"));
        };
        let n = values.len() / dim;
        if n < 2 {
            return Err(AuditError::invalid("need at least two observations to measure spread"));
        }
        let mut total = 0.0;
        for c in 0..*dim {
            let col = values.iter().skip(c).step_by(*dim);
            let mean = col.clone().sum::<f64>() / n as f64;
            let ss: f64 = col.map(|v| (v - mean).powi(2)).sum();
            total += (ss / (n - 1) as f64).sqrt();
        }
        Ok(total / *dim as f64)
    }
}
