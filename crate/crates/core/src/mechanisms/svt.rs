use serde::{Deserialize, Serialize};

use super::{Input, Mechanism};
use crate::density::{Sample, SpaceTag, Symbol};
use crate::error::{AuditError, Result};
use crate::statcore::{laplace_inverse_cdf, AuditRng};

/// Sparse vector technique variants.
///
/// With `c = M` the maximum number of positive answers and budget `ε₀`:
///
/// | variant | threshold noise ρ       | query noise ν        | halts after M ⊤ |
/// |---------|-------------------------|----------------------|-----------------|
/// | SVT2    | Lap(c/ε₁), ε₁ = ε₀/2, refreshed after each ⊤ | Lap(2c/ε₂), ε₂ = ε₀/2 | yes |
/// | SVT4    | Lap(1/ε₁), ε₁ = ε₀/4    | Lap(2c/ε₂), ε₂ = 3ε₀/4 | yes |
/// | SVT5    | Lap(1/ε₀)               | none                 | no              |
/// | SVT6    | Lap(1/ε₁), ε₁ = ε₀/2    | Lap(1/ε₂), ε₂ = ε₀/2 | no              |
///
/// SVT2 and SVT4 are `ε₀`-private; SVT5 and SVT6 are not private at all.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SvtVariant {
    Svt2,
    Svt4,
    Svt5,
    Svt6,
}

impl SvtVariant {
    pub fn name(self) -> &'static str {
        match self {
            SvtVariant::Svt2 => "svt2",
            SvtVariant::Svt4 => "svt4",
            SvtVariant::Svt5 => "svt5",
            SvtVariant::Svt6 => "svt6",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "svt2" => Ok(SvtVariant::Svt2),
            "svt4" => Ok(SvtVariant::Svt4),
            "svt5" => Ok(SvtVariant::Svt5),
            "svt6" => Ok(SvtVariant::Svt6),
            other => Err(AuditError::invalid(format!("unknown SVT variant `{other}`"))),
        }
    }

    pub fn halts(self) -> bool {
        matches!(self, SvtVariant::Svt2 | SvtVariant::Svt4)
    }

    pub fn is_private(self) -> bool {
        self.halts()
    }

    /// (threshold scale, query scale or 0, refresh threshold after ⊤)
    fn scales(self, epsilon0: f64, m: usize) -> (f64, f64, bool) {
        let c = m as f64;
        match self {
            SvtVariant::Svt2 => {
                let (e1, e2) = (epsilon0 / 2.0, epsilon0 / 2.0);
                (c / e1, 2.0 * c / e2, true)
            }
            SvtVariant::Svt4 => {
                let (e1, e2) = (epsilon0 / 4.0, 3.0 * epsilon0 / 4.0);
                (1.0 / e1, 2.0 * c / e2, false)
            }
            SvtVariant::Svt5 => (1.0 / epsilon0, 0.0, false),
            SvtVariant::Svt6 => {
                let (e1, e2) = (epsilon0 / 2.0, epsilon0 / 2.0);
                (1.0 / e1, 1.0 / e2, false)
            }
        }
    }
}

const MAX_SEQUENCE: usize = 32;

/// Encodes a ⊤/⊥ answer sequence as `len << 32 | bits`, bit `i` set when the
/// `i`-th answer is ⊤.
pub fn encode_sequence(answers: &[bool]) -> Symbol {
    debug_assert!(answers.len() <= MAX_SEQUENCE);
    let bits = answers
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &a)| acc | ((a as u64) << i));
    ((answers.len() as u64) << 32) | bits
}

pub fn decode_sequence(code: Symbol) -> Vec<bool> {
    let len = (code >> 32) as usize;
    (0..len).map(|i| code >> i & 1 == 1).collect()
}

fn encodes_first_positive(variant: SvtVariant, max_positive: usize) -> bool {
    variant.halts() && max_positive == 1
}

fn run(
    variant: SvtVariant,
    q: &[i64],
    threshold: f64,
    max_positive: usize,
    scales: (f64, f64, bool),
    rng: &mut AuditRng,
    answers: &mut Vec<bool>,
) -> Symbol {
    let (rho_scale, nu_scale, refresh) = scales;
    answers.clear();
    let mut rho = laplace_inverse_cdf(rng.open_unit(), rho_scale);
    let mut positives = 0;
    for &qi in q {
        let nu = if nu_scale > 0.0 {
            laplace_inverse_cdf(rng.open_unit(), nu_scale)
        } else {
            0.0
        };
        let top = qi as f64 + nu >= threshold + rho;
        answers.push(top);
        if top {
            positives += 1;
            if variant.halts() {
                if positives == max_positive {
                    break;
                }
                if refresh {
                    rho = laplace_inverse_cdf(rng.open_unit(), rho_scale);
                }
            }
        }
    }
    if encodes_first_positive(variant, max_positive) {
        answers.iter().position(|&a| a).map_or(0, |i| i as Symbol + 1)
    } else {
        encode_sequence(answers)
    }
}

fn check(q: &[i64], max_positive: usize, epsilon0: f64) -> Result<()> {
    if q.is_empty() {
        return Err(AuditError::invalid("SVT needs at least one query"));
    }
    if q.len() > MAX_SEQUENCE {
        return Err(AuditError::invalid(format!(
            "SVT supports at most {MAX_SEQUENCE} queries"
        )));
    }
    if max_positive == 0 {
        return Err(AuditError::invalid("SVT needs M >= 1"));
    }
    if !(epsilon0 > 0.0) || !epsilon0.is_finite() {
        return Err(AuditError::invalid("privacy level must be positive"));
    }
    Ok(())
}

/// One run of the chosen variant. Halting variants with `M = 1` report the
/// position of the first ⊤ (or 0 when every answer is ⊥); all other
/// configurations report the full answer sequence via [`encode_sequence`].
pub fn svt(
    variant: SvtVariant,
    q: &[i64],
    threshold: f64,
    max_positive: usize,
    epsilon0: f64,
    rng: &mut AuditRng,
) -> Result<Symbol> {
    check(q, max_positive, epsilon0)?;
    let scales = variant.scales(epsilon0, max_positive);
    Ok(run(variant, q, threshold, max_positive, scales, rng, &mut Vec::new()))
}

#[derive(Clone, Debug)]
pub struct SparseVector {
    pub variant: SvtVariant,
    pub epsilon0: f64,
    pub threshold: f64,
    pub max_positive: usize,
    pub d: usize,
}

impl SparseVector {
    pub fn new(variant: SvtVariant, epsilon0: f64, threshold: f64, max_positive: usize, d: usize) -> Result<Self> {
        check(&vec![0; d.max(1)], max_positive, epsilon0)?;
        if d == 0 {
            return Err(AuditError::invalid("SVT needs at least one query"));
        }
        Ok(SparseVector {
            variant,
            epsilon0,
            threshold,
            max_positive,
            d,
        })
    }
}

impl Mechanism for SparseVector {
    fn name(&self) -> &str {
        self.variant.name()
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Discrete
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let q = input.as_query()?;
        if q.len() != self.d {
            return Err(AuditError::invalid(format!(
                "expected {} query answers, got {}",
                self.d,
                q.len()
            )));
        }
        let scales = self.variant.scales(self.epsilon0, self.max_positive);
        let mut buf = Vec::with_capacity(self.d);
        Sample::discrete(
            (0..n)
                .map(|_| {
                    run(
                        self.variant,
                        &q,
                        self.threshold,
                        self.max_positive,
                        scales,
                        rng,
                        &mut buf,
                    )
                })
                .collect(),
        )
    }

    fn alphabet(&self) -> Option<Vec<Symbol>> {
        if encodes_first_positive(self.variant, self.max_positive) {
            Some((0..=self.d as Symbol).collect())
        } else if !self.variant.halts() && self.d <= 12 {
            let len = (self.d as u64) << 32;
            Some((0..1u64 << self.d).map(|bits| len | bits).collect())
        } else {
            None
        }
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(if self.variant.is_private() {
            self.epsilon0
        } else {
            f64::INFINITY
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequence_codes_round_trip() {
        let a = vec![true, false, false, true, true];
        assert_eq!(decode_sequence(encode_sequence(&a)), a);
        assert_ne!(encode_sequence(&[false]), encode_sequence(&[false, false]));
    }

    #[test]
    fn svt5_far_above_threshold_is_deterministic() {
        let mut rng = AuditRng::new(5);
        let q = vec![1000; 10];
        for _ in 0..1000 {
            let out = svt(SvtVariant::Svt5, &q, 1.0, 1, 1.5, &mut rng).unwrap();
            assert_eq!(out, encode_sequence(&[true; 10]));
        }
    }

    #[test]
    fn first_positive_alphabet_has_d_plus_one_symbols() {
        for v in [SvtVariant::Svt2, SvtVariant::Svt4] {
            let m = SparseVector::new(v, 0.7, 1.0, 1, 10).unwrap();
            let alphabet = m.alphabet().unwrap();
            assert_eq!(alphabet.len(), 11);
            let mut rng = AuditRng::new(2);
            let Sample::Discrete(vals) = m.sample(&Input::query(&[1; 10]), 20_000, &mut rng).unwrap() else {
                unreachable!()
            };
            assert!(vals.iter().all(|s| alphabet.contains(s)));
        }
    }

    #[test]
    fn halting_variant_stops_after_m_positives() {
        let mut rng = AuditRng::new(3);
        let q = vec![50; 8];
        for _ in 0..200 {
            let code = svt(SvtVariant::Svt2, &q, 1.0, 2, 1.0, &mut rng).unwrap();
            let seq = decode_sequence(code);
            assert!(seq.iter().filter(|&&a| a).count() <= 2);
            assert_eq!(seq.iter().filter(|&&a| a).count(), 2);
            assert!(seq.last().copied().unwrap());
        }
    }

    #[test]
    fn identical_inputs_identical_streams() {
        let m = SparseVector::new(SvtVariant::Svt2, 0.7, 1.0, 1, 10).unwrap();
        let x = Input::query(&[1; 10]);
        let a = m.sample(&x, 1000, &mut AuditRng::new(9)).unwrap();
        let b = m.sample(&x, 1000, &mut AuditRng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(SparseVector::new(SvtVariant::Svt2, 0.7, 1.0, 0, 10).is_err());
        assert!(SparseVector::new(SvtVariant::Svt2, 0.0, 1.0, 1, 10).is_err());
        assert!(SvtVariant::from_name("svt3").is_err());
    }
}
