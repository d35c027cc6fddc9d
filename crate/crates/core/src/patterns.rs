//! Adjacent input pairs: query patterns for discrete mechanisms, statistic
//! shifts for continuous ones, and full neighbourhoods of a fixed input.

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};
use crate::mechanisms::{Adjacency, AdjacentPair, Input, MechanismKind};

/// `max_i |q_i - q'_i| <= 1`.
pub fn is_query_adjacent(q: &[i64], q_prime: &[i64]) -> Result<bool> {
    if q.len() != q_prime.len() {
        return Err(AuditError::invalid(format!(
            "query vectors have lengths {} and {}",
            q.len(),
            q_prime.len()
        )));
    }
    Ok(q.iter().zip(q_prime).all(|(a, b)| a.abs_diff(*b) <= 1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedPair {
    pub id: usize,
    pub name: String,
    #[serde(flatten)]
    pub pair: AdjacentPair,
}

/// An ordered, named list of adjacent pairs. Ids are positions in the list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternSet {
    pub name: String,
    pub pairs: Vec<NamedPair>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl PatternSet {
    pub fn new(name: impl Into<String>) -> Self {
        PatternSet {
            name: name.into(),
            pairs: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, pair: AdjacentPair) {
        let id = self.pairs.len();
        self.pairs.push(NamedPair {
            id,
            name: name.into(),
            pair,
        });
    }

    pub fn extend(&mut self, other: PatternSet) {
        for p in other.pairs {
            self.push(p.name, p.pair);
        }
        self.warnings.extend(other.warnings);
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn adjacent_pairs(&self) -> Vec<AdjacentPair> {
        self.pairs.iter().map(|p| p.pair.clone()).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pattern sets always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: PatternSet = serde_json::from_str(text).map_err(|e| AuditError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for p in &set.pairs {
            if !p.pair.is_adjacent()? {
                return Err(AuditError::invalid(format!("pair `{}` is not adjacent", p.name)));
            }
        }
        Ok(set)
    }
}

fn repeat(parts: &[(i64, usize)]) -> Vec<i64> {
    parts.iter().flat_map(|&(v, n)| std::iter::repeat_n(v, n)).collect()
}

/// The seven classic query patterns, stretched to length `d`. For odd `d`
/// the two half-split patterns are skipped and a warning is recorded.
pub fn table1_pairs(d: usize) -> Result<PatternSet> {
    if d < 2 {
        return Err(AuditError::invalid("query patterns need d >= 2"));
    }
    let ones = repeat(&[(1, d)]);
    let h = d / 2;
    let mut set = PatternSet::new(format!("table1_d{d}"));
    let mut add = |name: &str, q: Vec<i64>, qp: Vec<i64>| -> Result<()> {
        set.push(name, AdjacentPair::queries(&q, &qp)?);
        Ok(())
    };
    add("one_above", ones.clone(), repeat(&[(2, 1), (1, d - 1)]))?;
    add("one_below", ones.clone(), repeat(&[(0, 1), (1, d - 1)]))?;
    add("one_above_rest_below", ones.clone(), repeat(&[(2, 1), (0, d - 1)]))?;
    add("one_below_rest_above", ones.clone(), repeat(&[(0, 1), (2, d - 1)]))?;
    if d.is_multiple_of(2) {
        add("half_half", ones.clone(), repeat(&[(0, h), (1, h)]))?;
    }
    add("all_above_all_below", ones.clone(), repeat(&[(2, d)]))?;
    if d.is_multiple_of(2) {
        add("x_shape", repeat(&[(1, h), (0, h)]), repeat(&[(0, h), (1, h)]))?;
    } else {
        set.warnings
            .push(format!("odd length {d}: half_half and x_shape omitted"));
    }
    Ok(set)
}

/// Pairs `(2^a 1^(d-a))` vs `(1^a 2^(d-a))` for `a = d-1, d-2, d-3`. These
/// push the threshold mechanisms' first-positive index towards the tail,
/// where the privacy loss of a correct sparse vector is largest.
pub fn staircase_pairs(d: usize) -> Result<PatternSet> {
    let mut set = PatternSet::new(format!("staircase_d{d}"));
    for a in (d.saturating_sub(3).max(1)..d).rev() {
        let q = repeat(&[(2, a), (1, d - a)]);
        let qp = repeat(&[(1, a), (2, d - a)]);
        set.push(format!("staircase_{a}"), AdjacentPair::queries(&q, &qp)?);
    }
    Ok(set)
}

pub const MAX_BINARY_D: usize = 20;
pub const MAX_CUBE_K: usize = 6;

/// Zero vector against every other point of `{0,1}^d`, in increasing binary
/// order of `q'` read with `q'_1` as the least significant digit.
pub fn binary_neighborhood(d: usize) -> Result<PatternSet> {
    if d == 0 || d > MAX_BINARY_D {
        return Err(AuditError::invalid(format!(
            "binary neighbourhood needs 1 <= d <= {MAX_BINARY_D}, got {d}"
        )));
    }
    let zero = vec![0i64; d];
    let mut set = PatternSet::new(format!("binary_neighborhood_d{d}"));
    for code in 1u32..(1 << d) {
        let q: Vec<i64> = (0..d).map(|i| (code >> i & 1) as i64).collect();
        let name = q.iter().map(|v| v.to_string()).collect::<String>();
        set.push(name, AdjacentPair::queries(&zero, &q)?);
    }
    Ok(set)
}

/// Centre `(1/2, ..., 1/2)` against every other point of `{0, 1/2, 1}^k`.
pub fn cube_grid_neighborhood(k: usize) -> Result<PatternSet> {
    if k == 0 || k > MAX_CUBE_K {
        return Err(AuditError::invalid(format!(
            "cube grid needs 1 <= k <= {MAX_CUBE_K}, got {k}"
        )));
    }
    let centre = vec![0.5; k];
    let mut set = PatternSet::new(format!("cube_grid_k{k}"));
    for code in 0..3usize.pow(k as u32) {
        let mut c = code;
        let point: Vec<f64> = (0..k)
            .map(|_| {
                let v = (c % 3) as f64 / 2.0;
                c /= 3;
                v
            })
            .collect();
        if point == centre {
            continue;
        }
        let name = format!("{}", Input::Vector(point.clone()));
        set.push(
            name,
            AdjacentPair::statistics(Input::Vector(centre.clone()), Input::Vector(point))?,
        );
    }
    Ok(set)
}

/// `base` against `base + b·step` for `b = 1..=count`, on every coordinate.
pub fn shift_pairs(name: &str, base: &[f64], step: f64, count: usize) -> Result<PatternSet> {
    let mut set = PatternSet::new(name);
    for b in 1..=count {
        let shifted: Vec<f64> = base.iter().map(|v| v + b as f64 * step).collect();
        let (x, xp) = if base.len() == 1 {
            (Input::Scalar(base[0]), Input::Scalar(shifted[0]))
        } else {
            (Input::Vector(base.to_vec()), Input::Vector(shifted))
        };
        set.push(format!("shift_{b}"), AdjacentPair::statistics(x, xp)?);
    }
    Ok(set)
}

/// Named pair lists selectable from a config file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairPreset {
    /// `s = 0` against `s' = b/10`, `b = 1..10`.
    LaplaceShift,
    /// `(0,..,0)` against `(b/10,..,b/10)`.
    NoisyMaxShift,
    /// `s = 1` against `s' = 1 + b/10`.
    ExponentialShift,
    Table1,
    /// The query patterns plus [`staircase_pairs`].
    SvtPatterns,
    BinaryNeighborhood,
    CubeGrid,
    /// Single pair `0` against `1`.
    UnitShift,
}

impl PairPreset {
    pub fn name(self) -> &'static str {
        match self {
            PairPreset::LaplaceShift => "laplace_shift",
            PairPreset::NoisyMaxShift => "noisy_max_shift",
            PairPreset::ExponentialShift => "exponential_shift",
            PairPreset::Table1 => "table1",
            PairPreset::SvtPatterns => "svt_patterns",
            PairPreset::BinaryNeighborhood => "binary_neighborhood",
            PairPreset::CubeGrid => "cube_grid",
            PairPreset::UnitShift => "unit_shift",
        }
    }

    /// The pair list used for global audits of a mechanism kind.
    pub fn default_for(kind: MechanismKind) -> PairPreset {
        match kind {
            MechanismKind::Laplace => PairPreset::LaplaceShift,
            MechanismKind::ContinuousNoisyMax => PairPreset::NoisyMaxShift,
            MechanismKind::Exponential => PairPreset::ExponentialShift,
            MechanismKind::ReportNoisyMax => PairPreset::Table1,
            MechanismKind::RandomizedResponse | MechanismKind::Gaussian => PairPreset::UnitShift,
            _ => PairPreset::SvtPatterns,
        }
    }

    pub fn is_neighborhood(self) -> bool {
        matches!(self, PairPreset::BinaryNeighborhood | PairPreset::CubeGrid)
    }

    /// Generates the pairs for inputs of length `len`.
    pub fn generate(self, len: usize, kind: MechanismKind) -> Result<PatternSet> {
        match self {
            PairPreset::LaplaceShift => shift_pairs(self.name(), &[0.0], 0.1, 10),
            PairPreset::NoisyMaxShift => shift_pairs(self.name(), &vec![0.0; len], 0.1, 10),
            PairPreset::ExponentialShift => shift_pairs(self.name(), &[1.0], 0.1, 10),
            PairPreset::Table1 => table1_pairs(len),
            PairPreset::SvtPatterns => {
                let mut set = table1_pairs(len)?;
                set.name = self.name().to_string();
                set.extend(staircase_pairs(len)?);
                Ok(set)
            }
            PairPreset::BinaryNeighborhood => binary_neighborhood(len),
            PairPreset::CubeGrid => cube_grid_neighborhood(len),
            PairPreset::UnitShift => {
                let adjacency = if kind.is_discrete() {
                    Adjacency::Hamming
                } else {
                    Adjacency::Statistic
                };
                let mut set = PatternSet::new(self.name());
                set.push(
                    "unit",
                    AdjacentPair::new(Input::Scalar(0.0), Input::Scalar(1.0), adjacency)?,
                );
                Ok(set)
            }
        }
    }
}
