use super::{check_floor, Sample};
use crate::error::{AuditError, Result};
use crate::statcore::kernel::GAUSSIAN_CUTOFF;
use crate::statcore::{Kernel, KernelShape};

/// Steps between exact re-evaluations in the grid recurrence.
const REANCHOR: usize = 64;

/// Kernel density estimator floored at `tau`.
///
/// One-dimensional samples are stored sorted, so evaluation only visits
/// observations within `GAUSSIAN_CUTOFF` bandwidths of the query point.
/// Sorting is harmless because the estimator is permutation invariant.
#[derive(Clone, Debug)]
pub struct KernelEstimate {
    values: Vec<f64>,
    dim: usize,
    bandwidth: f64,
    kernel: Kernel,
    floor: f64,
}

impl KernelEstimate {
    pub fn new(sample: &Sample, bandwidth: f64, kernel: Kernel, floor: f64) -> Result<Self> {
        let Sample::Continuous { dim, values } = sample else {
            return Err(AuditError::invalid("kernel estimator needs a continuous sample"));
        };
        if values.is_empty() {
            return Err(AuditError::invalid("sample is empty"));
        }
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(AuditError::invalid(format!(
                "bandwidth must be positive, got {bandwidth}"
            )));
        }
        if kernel.dim != *dim {
            return Err(AuditError::invalid(format!(
                "kernel dimension {} does not match sample dimension {dim}",
                kernel.dim
            )));
        }
        check_floor(floor)?;
        let mut values = values.clone();
        if *dim == 1 {
            values.sort_by(f64::total_cmp);
        }
        Ok(KernelEstimate {
            values,
            dim: *dim,
            bandwidth,
            kernel,
            floor,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn sample_size(&self) -> usize {
        self.values.len() / self.dim
    }

    fn norm(&self) -> f64 {
        1.0 / (self.sample_size() as f64 * self.bandwidth.powi(self.dim as i32))
    }

    /// Untruncated estimate at a scalar point (one-dimensional samples).
    pub fn raw(&self, t: f64) -> Result<f64> {
        if self.dim != 1 {
            return Err(AuditError::invalid("scalar evaluation of a multivariate estimator"));
        }
        let h = self.bandwidth;
        let reach = GAUSSIAN_CUTOFF * h;
        let lo = self.values.partition_point(|&x| x < t - reach);
        let hi = self.values.partition_point(|&x| x <= t + reach);
        let sum: f64 = self.values[lo..hi]
            .iter()
            .map(|&x| {
                let u = (t - x) / h;
                self.kernel.radial(u * u)
            })
            .sum();
        Ok(sum * self.norm())
    }

    /// Untruncated estimate at a point of `R^d`.
    pub fn raw_at(&self, t: &[f64]) -> Result<f64> {
        if t.len() != self.dim {
            return Err(AuditError::invalid("evaluation point has the wrong dimension"));
        }
        if self.dim == 1 {
            return self.raw(t[0]);
        }
        let h = self.bandwidth;
        let sum: f64 = self
            .values
            .chunks_exact(self.dim)
            .map(|x| {
                let r2: f64 = x.iter().zip(t).map(|(a, b)| ((b - a) / h).powi(2)).sum();
                self.kernel.radial(r2)
            })
            .sum();
        Ok(sum * self.norm())
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.raw(t)?.max(self.floor))
    }

    /// Untruncated estimate on the uniform grid `lo + j * step`, `j < count`.
    ///
    /// Each observation is scattered onto the grid points within the cutoff
    /// using the exact identity
    /// `exp(-(u+δ)²/2) = exp(-u²/2) · exp(-uδ - δ²/2)`, whose second factor
    /// itself changes by `exp(-δ²)` per step. This replaces one `exp` per
    /// kernel term with two multiplications; values agree with [`Self::raw`]
    /// to about `1e-12` relative.
    pub fn raw_on_uniform_grid(&self, lo: f64, step: f64, count: usize) -> Result<Vec<f64>> {
        if self.dim != 1 {
            return Err(AuditError::invalid("grid evaluation needs a one-dimensional estimator"));
        }
        if count == 0 || !(step > 0.0) {
            return Err(AuditError::invalid("grid needs a positive step and at least one point"));
        }
        let KernelShape::Gaussian = self.kernel.shape;
        let h = self.bandwidth;
        let reach = GAUSSIAN_CUTOFF * h;
        let delta = step / h;
        let m = (-delta * delta).exp();
        let last = (count - 1) as f64;
        let mut acc = vec![0.0f64; count];
        for &x in &self.values {
            let first = ((x - reach - lo) / step).ceil().max(0.0);
            let end = ((x + reach - lo) / step).floor().min(last);
            if first > end {
                continue;
            }
            let (first, end) = (first as usize, end as usize);
            let mut j = first;
            while j <= end {
                let u = (lo + j as f64 * step - x) / h;
                let mut v = (-0.5 * u * u).exp();
                let mut r = (-u * delta - 0.5 * delta * delta).exp();
                let stop = (j + REANCHOR).min(end + 1);
                for slot in &mut acc[j..stop] {
                    *slot += v;
                    v *= r;
                    r *= m;
                }
                j = stop;
            }
        }
        let scale = self.kernel.peak() * self.norm();
        acc.iter_mut().for_each(|a| *a *= scale);
        Ok(acc)
    }
}
