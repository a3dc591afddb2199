//! Expected number of real zeros of random polynomials built on the
//! orthonormal monomial basis of a radial weight.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod equilibrium;
pub mod error;
pub mod kacrice;
pub mod kernel;
pub mod orthonorm;
pub mod quadrature;
pub mod sampling;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};

/// Crate version, embedded in every output file.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
