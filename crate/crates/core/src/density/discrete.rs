use super::{check_floor, Sample, Symbol};
use crate::error::{AuditError, Result};

/// Relative-frequency estimator over exact symbol equality, floored at `tau`.
#[derive(Clone, Debug)]
pub struct DiscreteEstimate {
    /// Distinct observed symbols in ascending order with their counts.
    counts: Vec<(Symbol, u64)>,
    n: usize,
    floor: f64,
}

impl DiscreteEstimate {
    pub fn new(sample: &Sample, floor: f64) -> Result<Self> {
        let Sample::Discrete(values) = sample else {
            return Err(AuditError::invalid("discrete estimator needs a discrete sample"));
        };
        if values.is_empty() {
            return Err(AuditError::invalid("sample is empty"));
        }
        check_floor(floor)?;
        let mut sorted = values.clone();
        sorted.sort_unstable();
        let mut counts: Vec<(Symbol, u64)> = Vec::new();
        for s in sorted {
            match counts.last_mut() {
                Some((last, c)) if *last == s => *c += 1,
                _ => counts.push((s, 1)),
            }
        }
        Ok(DiscreteEstimate {
            counts,
            n: values.len(),
            floor,
        })
    }

    pub fn count(&self, symbol: Symbol) -> u64 {
        self.counts
            .binary_search_by_key(&symbol, |(s, _)| *s)
            .map(|i| self.counts[i].1)
            .unwrap_or(0)
    }

    /// Untruncated relative frequency `count(t) / n`.
    pub fn frequency(&self, symbol: Symbol) -> f64 {
        self.count(symbol) as f64 / self.n as f64
    }

    pub fn eval(&self, symbol: Symbol) -> f64 {
        self.frequency(symbol).max(self.floor)
    }

    /// Observed symbols in ascending order.
    pub fn support(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.counts.iter().map(|(s, _)| *s)
    }

    pub fn counts(&self) -> &[(Symbol, u64)] {
        &self.counts
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_floor() {
        let s = Sample::discrete(vec![1, 1, 2]).unwrap();
        let d = DiscreteEstimate::new(&s, 0.01).unwrap();
        assert_eq!(d.eval(1), 2.0 / 3.0);
        assert_eq!(d.eval(2), 1.0 / 3.0);
        assert_eq!(d.eval(3), 0.01);
        assert_eq!(d.support().collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn counts_sum_to_n() {
        let s = Sample::discrete(vec![5, 3, 3, 9, 5, 5, 1]).unwrap();
        let d = DiscreteEstimate::new(&s, 0.0).unwrap();
        let total: u64 = d.counts().iter().map(|(_, c)| c).sum();
        assert_eq!(total as usize, d.sample_size());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Sample::discrete(vec![]).is_err());
        let s = Sample::discrete(vec![1]).unwrap();
        assert!(DiscreteEstimate::new(&s, -0.1).is_err());
        let c = Sample::scalar(vec![0.5]).unwrap();
        assert!(DiscreteEstimate::new(&c, 0.1).is_err());
    }
}
