//! Monte Carlo interior-penalty discontinuous Galerkin solver for the 2D
//! elastic Helmholtz equation in a weakly random medium.
//!
//! The random coefficient is `α = 1 + εη` with `η` a clamped Gaussian field.
//! Besides the classical sampler that factorizes one perturbed operator per
//! sample, the crate implements the multi-modes expansion, which reuses a
//! single factorization of the background operator for every sample and mode.

pub mod dg;
pub mod engines;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod manufactured;
pub mod mesh;
pub mod random_field;
pub mod source;

pub use error::{Error, Result};
