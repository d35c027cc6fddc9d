use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

/// Input handed to a mechanism: a scalar statistic (or bit), or a vector of
/// statistics / counting-query answers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Input {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl Input {
    pub fn query(values: &[i64]) -> Self {
        Input::Vector(values.iter().map(|&v| v as f64).collect())
    }

    pub fn as_scalar(&self) -> Result<f64> {
        match self {
            Input::Scalar(v) => Ok(*v),
            Input::Vector(v) if v.len() == 1 => Ok(v[0]),
            Input::Vector(_) => Err(AuditError::invalid("expected a scalar input")),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        match self {
            Input::Scalar(v) => std::slice::from_ref(v),
            Input::Vector(v) => v,
        }
    }

    /// Integer query answers; every entry must be integral.
    pub fn as_query(&self) -> Result<Vec<i64>> {
        self.as_slice()
            .iter()
            .map(|&v| {
                if v.fract() == 0.0 && v.abs() < 9.0e15 {
                    Ok(v as i64)
                } else {
                    Err(AuditError::invalid(format!("query answer {v} is not an integer")))
                }
            })
            .collect()
    }

    pub fn as_bit(&self) -> Result<bool> {
        match self.as_scalar()? {
            0.0 => Ok(false),
            1.0 => Ok(true),
            v => Err(AuditError::invalid(format!("expected a bit, got {v}"))),
        }
    }

    pub fn len(&self) -> usize {
        self.as_slice().len()
    }

    pub fn is_empty(&self) -> bool {
        self.as_slice().is_empty()
    }
}

impl fmt::Display for Input {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Input::Scalar(v) => write!(f, "{v}"),
            Input::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// How two inputs are considered neighbours.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adjacency {
    /// Databases differing in at most one record.
    Hamming,
    /// Counting-query answers differing by at most one in every coordinate.
    Query,
    /// Aggregate statistics; any two points of the statistic's domain.
    Statistic,
}

/// A pair of neighbouring inputs `(x, x')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdjacentPair {
    pub x: Input,
    pub x_prime: Input,
    pub adjacency: Adjacency,
}

impl AdjacentPair {
    pub fn new(x: Input, x_prime: Input, adjacency: Adjacency) -> Result<Self> {
        let pair = AdjacentPair { x, x_prime, adjacency };
        if !pair.is_adjacent()? {
            return Err(AuditError::invalid(format!(
                "inputs {} and {} are not {:?}-adjacent",
                pair.x, pair.x_prime, pair.adjacency
            )));
        }
        Ok(pair)
    }

    pub fn queries(q: &[i64], q_prime: &[i64]) -> Result<Self> {
        AdjacentPair::new(Input::query(q), Input::query(q_prime), Adjacency::Query)
    }

    pub fn statistics(s: Input, s_prime: Input) -> Result<Self> {
        AdjacentPair::new(s, s_prime, Adjacency::Statistic)
    }

    pub fn swapped(&self) -> Self {
        AdjacentPair {
            x: self.x_prime.clone(),
            x_prime: self.x.clone(),
            adjacency: self.adjacency,
        }
    }

    /// Checks the adjacency predicate of the declared kind.
    pub fn is_adjacent(&self) -> Result<bool> {
        let (a, b) = (self.x.as_slice(), self.x_prime.as_slice());
        if a.len() != b.len() {
            return Err(AuditError::invalid("paired inputs have different lengths"));
        }
        Ok(match self.adjacency {
            Adjacency::Hamming => a.iter().zip(b).filter(|(u, v)| u != v).count() <= 1,
            Adjacency::Query => {
                let qa = self.x.as_query()?;
                let qb = self.x_prime.as_query()?;
                crate::patterns::is_query_adjacent(&qa, &qb)?
            }
            // a few ulps of slack so that `s + 1.0` stays adjacent to `s`
            Adjacency::Statistic => a
                .iter()
                .zip(b)
                .all(|(u, v)| (u - v).abs() <= 1.0 + 4.0 * f64::EPSILON * u.abs().max(v.abs()).max(1.0)),
        })
    }
}
