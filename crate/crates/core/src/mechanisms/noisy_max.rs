use super::laplace::check_lambda;
use super::{draw_n, Input, Mechanism};
use crate::density::{Location, Sample, SpaceTag, Symbol};
use crate::error::{AuditError, Result};
use crate::statcore::{laplace_inverse_cdf, AuditRng};

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(AuditError::invalid(format!(
            "privacy level must be positive, got {eps}"
        )))
    }
}

/// Index (1-based) of the largest `q_i + Lap(2/ε₀)`. Exact ties go to the
/// smallest index.
pub fn report_noisy_max(q: &[i64], epsilon0: f64, rng: &mut AuditRng) -> Result<Symbol> {
    check_epsilon(epsilon0)?;
    if q.len() < 2 {
        return Err(AuditError::invalid("report noisy max needs at least two queries"));
    }
    Ok(noisy_argmax(q, 2.0 / epsilon0, rng))
}

fn noisy_argmax(q: &[i64], scale: f64, rng: &mut AuditRng) -> Symbol {
    let mut best = f64::NEG_INFINITY;
    let mut arg = 0;
    for (i, &v) in q.iter().enumerate() {
        let noisy = v as f64 + laplace_inverse_cdf(rng.open_unit(), scale);
        if noisy > best {
            best = noisy;
            arg = i;
        }
    }
    arg as Symbol + 1
}

/// Publishes `max_i (s_i + Lap(1/λ))`.
pub fn continuous_noisy_max(s: &[f64], lambda: f64, rng: &mut AuditRng) -> Result<f64> {
    check_lambda(lambda)?;
    if s.is_empty() {
        return Err(AuditError::invalid("continuous noisy max needs at least one statistic"));
    }
    Ok(noisy_maximum(s, 1.0 / lambda, rng))
}

fn noisy_maximum(s: &[f64], scale: f64, rng: &mut AuditRng) -> f64 {
    s.iter()
        .map(|&v| v + laplace_inverse_cdf(rng.open_unit(), scale))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn lap_pdf(x: f64, b: f64) -> f64 {
    (-x.abs() / b).exp() / (2.0 * b)
}

fn lap_cdf(x: f64, b: f64) -> f64 {
    if x < 0.0 {
        0.5 * (x / b).exp()
    } else {
        1.0 - 0.5 * (-x / b).exp()
    }
}

/// Report Noisy Max over `d` counting queries at privacy level `ε₀`.
#[derive(Clone, Debug)]
pub struct ReportNoisyMax {
    pub epsilon0: f64,
    pub d: usize,
}

impl ReportNoisyMax {
    pub fn new(epsilon0: f64, d: usize) -> Result<Self> {
        check_epsilon(epsilon0)?;
        if d < 2 {
            return Err(AuditError::invalid("report noisy max needs at least two queries"));
        }
        Ok(ReportNoisyMax { epsilon0, d })
    }

    fn query(&self, input: &Input) -> Result<Vec<i64>> {
        let q = input.as_query()?;
        if q.len() != self.d {
            return Err(AuditError::invalid(format!(
                "expected {} query answers, got {}",
                self.d,
                q.len()
            )));
        }
        Ok(q)
    }

    /// Output probabilities by numerical integration of
    /// `P(k) = ∫ f(x - q_k) Π_{j≠k} F(x - q_j) dx`.
    pub fn probabilities(&self, q: &[i64]) -> Vec<f64> {
        let b = 2.0 / self.epsilon0;
        let lo = *q.iter().min().unwrap_or(&0) as f64 - 60.0 * b;
        let hi = *q.iter().max().unwrap_or(&0) as f64 + 60.0 * b;
        let m = 400_000;
        let h = (hi - lo) / m as f64;
        (0..q.len())
            .map(|k| {
                let g = |x: f64| {
                    let mut v = lap_pdf(x - q[k] as f64, b);
                    for (j, &qj) in q.iter().enumerate() {
                        if j != k {
                            v *= lap_cdf(x - qj as f64, b);
                        }
                    }
                    v
                };
                let mut acc = g(lo) + g(hi);
                for i in 1..m {
                    acc += if i % 2 == 1 { 4.0 } else { 2.0 } * g(lo + i as f64 * h);
                }
                acc * h / 3.0
            })
            .collect()
    }
}

impl Mechanism for ReportNoisyMax {
    fn name(&self) -> &str {
        "report_noisy_max"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Discrete
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let q = self.query(input)?;
        let scale = 2.0 / self.epsilon0;
        Sample::discrete((0..n).map(|_| noisy_argmax(&q, scale, rng)).collect())
    }

    fn alphabet(&self) -> Option<Vec<Symbol>> {
        Some((1..=self.d as Symbol).collect())
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(self.epsilon0)
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let q = self.query(input).ok()?;
        let Location::Symbol(s) = *at else { return None };
        if s == 0 || s as usize > self.d {
            return Some(0.0);
        }
        Some(self.probabilities(&q)[s as usize - 1])
    }
}

/// Continuous Noisy Max over a statistic in `[0,1]^k`; `kλ`-private.
#[derive(Clone, Debug)]
pub struct ContinuousNoisyMax {
    pub lambda: f64,
    pub k: usize,
}

impl ContinuousNoisyMax {
    pub fn new(lambda: f64, k: usize) -> Result<Self> {
        check_lambda(lambda)?;
        if k == 0 {
            return Err(AuditError::invalid("continuous noisy max needs k >= 1"));
        }
        Ok(ContinuousNoisyMax { lambda, k })
    }

    fn stats<'a>(&self, input: &'a Input) -> Result<&'a [f64]> {
        let s = input.as_slice();
        if s.len() != self.k {
            return Err(AuditError::invalid(format!(
                "expected {} statistics, got {}",
                self.k,
                s.len()
            )));
        }
        Ok(s)
    }

    /// `f(t) = Σ_i f₁(t - s_i) Π_{j≠i} F₁(t - s_j)`.
    pub fn pdf(&self, s: &[f64], t: f64) -> f64 {
        let b = 1.0 / self.lambda;
        (0..s.len())
            .map(|i| {
                let mut v = lap_pdf(t - s[i], b);
                for (j, &sj) in s.iter().enumerate() {
                    if j != i {
                        v *= lap_cdf(t - sj, b);
                    }
                }
                v
            })
            .sum()
    }
}

impl Mechanism for ContinuousNoisyMax {
    fn name(&self) -> &str {
        "continuous_noisy_max"
    }

    fn output_space(&self) -> SpaceTag {
        SpaceTag::Continuous { dim: 1 }
    }

    fn sample(&self, input: &Input, n: usize, rng: &mut AuditRng) -> Result<Sample> {
        let s = self.stats(input)?;
        let scale = 1.0 / self.lambda;
        Sample::scalar(draw_n(n, || noisy_maximum(s, scale, rng))?)
    }

    fn true_epsilon(&self) -> Option<f64> {
        Some(self.k as f64 * self.lambda)
    }

    /// Known in closed form when both inputs are constant vectors: shifting
    /// every coordinate by `c` changes the loss by at most `kλ|c|`, attained
    /// in the left tail.
    fn pair_epsilon(&self, x: &Input, x_prime: &Input) -> Option<f64> {
        let a = self.stats(x).ok()?;
        let b = self.stats(x_prime).ok()?;
        let constant = |v: &[f64]| v.iter().all(|&e| e == v[0]);
        if constant(a) && constant(b) {
            Some(self.k as f64 * self.lambda * (a[0] - b[0]).abs())
        } else if self.k == 1 {
            Some(self.lambda * (a[0] - b[0]).abs())
        } else {
            None
        }
    }

    fn density(&self, input: &Input, at: &Location) -> Option<f64> {
        let s = self.stats(input).ok()?;
        let Location::Real(t) = *at else { return None };
        Some(self.pdf(s, t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rnm_output_range_and_symmetry() {
        let m = ReportNoisyMax::new(1.5, 6).unwrap();
        let mut rng = AuditRng::new(11);
        let Sample::Discrete(v) = m.sample(&Input::query(&[1; 6]), 60_000, &mut rng).unwrap() else {
            unreachable!()
        };
        let mut counts = [0usize; 7];
        for s in v {
            assert!((1..=6).contains(&s));
            counts[s as usize] += 1;
        }
        for c in &counts[1..] {
            assert!((*c as f64 / 60_000.0 - 1.0 / 6.0).abs() < 0.01);
        }
        let p = m.probabilities(&[1; 6]);
        for v in p {
            assert!((v - 1.0 / 6.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rnm_rejects_short_queries() {
        assert!(ReportNoisyMax::new(1.0, 1).is_err());
        assert!(report_noisy_max(&[3], 1.0, &mut AuditRng::new(0)).is_err());
    }

    #[test]
    fn cnm_reduces_to_laplace_for_k1() {
        let m = ContinuousNoisyMax::new(0.5, 1).unwrap();
        let l = super::super::LaplaceMechanism::new(0.5).unwrap();
        let x = Input::Scalar(0.3);
        let mut r1 = AuditRng::new(4);
        let mut r2 = AuditRng::new(4);
        assert_eq!(m.sample(&x, 100, &mut r1).unwrap(), l.sample(&x, 100, &mut r2).unwrap());
        for t in [-1.0, 0.0, 0.7] {
            let a = m.density(&x, &Location::Real(t)).unwrap();
            let b = l.density(&x, &Location::Real(t)).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn cnm_epsilon() {
        let m = ContinuousNoisyMax::new(0.5, 3).unwrap();
        assert_eq!(m.true_epsilon(), Some(1.5));
        let x = Input::Vector(vec![0.0; 3]);
        let y = Input::Vector(vec![1.0; 3]);
        assert_eq!(m.pair_epsilon(&x, &y), Some(1.5));
        // flat loss equal to kλ in the left tail
        let l = m.analytic_loss(&x, &y, &Location::Real(-0.5)).unwrap();
        assert!((l - 1.5).abs() < 1e-12);
    }
}
