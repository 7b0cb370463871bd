//! Adaptive multilevel splitting (AMS) for rare-event probabilities in the
//! idealized setting, together with the objects needed to study its large
//! deviations:
//!
//! - [`dist`]: continuous laws with exact conditional sampling, and the
//!   order-statistic densities of the exponential case.
//! - [`splitting`]: the AMS(n, k; a, x) algorithm and its estimator.
//! - [`baselines`]: crude Monte Carlo and fixed-level splitting.
//! - [`rates`]: closed-form rate functions and their comparisons.
//! - [`laplace`]: the Laplace transform of the log-estimator through its
//!   functional equation, the order-k linear ODE and its characteristic roots.
//!
//! The crate is `no_std` and only needs an allocator.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod dist;
mod error;
pub mod laplace;
pub mod linalg;
pub mod math;
pub mod poly;
pub mod quad;
pub mod rates;
pub mod splitting;
pub mod stream;

pub use error::{Error, Result};
