use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{AuditError, Result};

/// Radius (in bandwidth units) beyond which the Gaussian kernel is treated as
/// zero. `exp(-72)` is below `1e-31`, far under any floor in use.
pub(crate) const GAUSSIAN_CUTOFF: f64 = 12.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelShape {
    Gaussian,
}

/// A spherically symmetric smoothing kernel on `R^d` with exponentially
/// decaying tails.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kernel {
    pub shape: KernelShape,
    pub dim: usize,
}

impl Kernel {
    pub fn gaussian(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(AuditError::invalid("kernel dimension must be positive"));
        }
        Ok(Kernel {
            shape: KernelShape::Gaussian,
            dim,
        })
    }

    /// Evaluates `K(u)`. For the Gaussian kernel this is the product of
    /// one-dimensional standard normal densities.
    pub fn eval(&self, u: &[f64]) -> Result<f64> {
        if u.len() != self.dim {
            return Err(AuditError::invalid(format!(
                "kernel of dimension {} evaluated at a point of dimension {}",
                self.dim,
                u.len()
            )));
        }
        let r2: f64 = u.iter().map(|v| v * v).sum();
        Ok(self.radial(r2))
    }

    /// `K` as a function of the squared radius `|u|^2`.
    #[inline]
    pub fn radial(&self, r2: f64) -> f64 {
        match self.shape {
            KernelShape::Gaussian => (-0.5 * r2).exp() / (2.0 * PI).powf(self.dim as f64 / 2.0),
        }
    }

    /// `K(0)`, the kernel's peak value.
    pub fn peak(&self) -> f64 {
        self.radial(0.0)
    }

    /// `∫ K(s)^2 ds`, the factor entering the asymptotic variance of the
    /// kernel estimator.
    pub fn square_integral(&self) -> f64 {
        match self.shape {
            KernelShape::Gaussian => (0.5 / PI.sqrt()).powi(self.dim as i32),
        }
    }

    /// Decay exponent `rho` and constant `C` such that `K(u) <= C exp(-rho |u|)`
    /// holds for all `|u| >= 1`.
    pub fn tail_bound(&self) -> (f64, f64) {
        match self.shape {
            // exp(-r^2/2) <= exp(1/2) exp(-r) for every r, via (r-1)^2 >= 0.
            KernelShape::Gaussian => (1.0, self.peak() * 0.5f64.exp()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let k = Kernel::gaussian(1).unwrap();
        assert!((k.eval(&[0.0]).unwrap() - 0.398_942_3).abs() < 1e-7);
        assert!((k.eval(&[1.0]).unwrap() - 0.241_970_7).abs() < 1e-7);
        assert_eq!(k.eval(&[-3.0]).unwrap(), k.eval(&[3.0]).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let k = Kernel::gaussian(2).unwrap();
        assert!(matches!(k.eval(&[0.0]), Err(AuditError::InvalidArgument(_))));
        assert!(Kernel::gaussian(0).is_err());
    }

    #[test]
    fn product_structure_in_two_dimensions() {
        let k1 = Kernel::gaussian(1).unwrap();
        let k2 = Kernel::gaussian(2).unwrap();
        let v = k2.eval(&[0.3, -1.2]).unwrap();
        let w = k1.eval(&[0.3]).unwrap() * k1.eval(&[-1.2]).unwrap();
        assert!((v - w).abs() < 1e-15);
    }

    #[test]
    fn square_integral_matches_quadrature() {
        // midpoint rule on [-10, 10]
        let k = Kernel::gaussian(1).unwrap();
        let m = 200_000;
        let step = 20.0 / m as f64;
        let quad: f64 = (0..m)
            .map(|i| {
                let s = -10.0 + (i as f64 + 0.5) * step;
                k.radial(s * s).powi(2) * step
            })
            .sum();
        assert!((k.square_integral() - 0.282_094_8).abs() < 1e-7);
        assert!((quad - k.square_integral()).abs() < 1e-6);

        let m2 = 800;
        let step2 = 20.0 / m2 as f64;
        let k2 = Kernel::gaussian(2).unwrap();
        let mut quad2 = 0.0;
        for i in 0..m2 {
            for j in 0..m2 {
                let a = -10.0 + (i as f64 + 0.5) * step2;
                let b = -10.0 + (j as f64 + 0.5) * step2;
                quad2 += k2.radial(a * a + b * b).powi(2) * step2 * step2;
            }
        }
        assert!((quad2 - k2.square_integral()).abs() < 1e-6);
        assert!((k2.square_integral() - k.square_integral().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn integrates_to_one() {
        let k = Kernel::gaussian(1).unwrap();
        let m = 100_000;
        let step = 40.0 / m as f64;
        let total: f64 = (0..m)
            .map(|i| {
                let s = -20.0 + (i as f64 + 0.5) * step;
                k.radial(s * s) * step
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-3);
    }

    #[test]
    fn tails_decay_exponentially() {
        let k = Kernel::gaussian(1).unwrap();
        let (rho, c) = k.tail_bound();
        for r in [5.0, 8.0, 10.0] {
            assert!(k.eval(&[r]).unwrap() <= c * (-rho * r).exp());
        }
        // monotone along a ray
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let r = i as f64 * 0.05;
            let v = k.eval(&[r]).unwrap();
            assert!(v >= 0.0 && v < prev);
            prev = v;
        }
    }
}
