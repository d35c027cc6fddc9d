//! Black-box estimation of differential-privacy parameters.
//!
//! Samples from a mechanism on two neighbouring inputs are turned into
//! truncated density estimates ([`density`]), compared through the empirical
//! privacy-loss function ([`loss`]), and the worst pair is re-estimated on
//! fresh samples to give an asymptotic lower confidence bound ([`mpl`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod density;
pub mod error;
pub mod harness;
pub mod loss;
pub mod mechanisms;
pub mod mpl;
pub mod patterns;
pub mod statcore;

pub use error::{AuditError, Result};
