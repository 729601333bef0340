//! Normal approximation of random sums `S = X_1 + ... + X_N`.
//!
//! The crate evaluates explicit Wasserstein and Kolmogorov error bounds for
//! the standardized sum `W = (S - E S) / sd(S)`, builds the size-bias
//! couplings of the index and the zero-bias transforms of the summands those
//! bounds need, and checks the bounds against exact computations and
//! reproducible Monte Carlo estimates.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biasing;
pub mod bounds;
pub mod error;
pub mod metrics;
pub mod models;
pub mod montecarlo;
pub mod pmf;
pub mod quadrature;
pub mod rng;
pub mod special;
pub mod stein;

pub use error::{Error, Result};
