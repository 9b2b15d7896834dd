//! Binary hypothesis testing on a driven, relaxing spin-1/2.
//!
//! The crate simulates two candidate field configurations of a qubit under
//! Lindblad dynamics and measures how well they can be told apart over time.
//! It compares the Helstrom success probability of the noisy evolution with
//! the noiseless one and reports when noise helps.

// Input checks are written as `!(x > 0.0)` so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod discrimination;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod propagator;
pub mod scenario;

pub use error::{Error, Result};
pub use scenario::Scenario;
