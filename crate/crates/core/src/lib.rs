//! Noisy iterative learning algorithms and the mutual-information budget
//! that bounds their generalization error.
//!
//! The crate covers four update rules (SGLD, perturbed SGD, noisy momentum,
//! noisy Nesterov), closed-form bounds for each, a one-step mutual
//! information oracle, and a Monte-Carlo harness that compares the bounds
//! against measured generalization gaps.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod engine;
pub mod error;
pub mod harness;
pub mod mi_oracle;
pub mod model;
pub mod rng;

pub use error::{Error, Result};
