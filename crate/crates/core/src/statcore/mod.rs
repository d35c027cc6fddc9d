//! Numeric primitives shared by the estimators: smoothing kernels, the
//! standard normal distribution, a splittable seeded generator and the base
//! noise samplers.

pub(crate) mod kernel;
mod normal;
mod rng;
mod sampling;

pub use kernel::{Kernel, KernelShape};
pub use normal::{std_normal_cdf, std_normal_quantile};
pub use rng::AuditRng;
pub use sampling::{laplace_inverse_cdf, sample_gaussian, sample_laplace};
