//! Monte Carlo laboratory for the minimum modulus of random trigonometric
//! polynomials and the point process of their near-minima.

pub mod cli;
pub mod coeffs;
pub mod config;
pub mod error;
pub mod extremal;
pub mod neteval;
pub mod perturb;
pub mod pipeline;
pub mod poly;
pub mod realcase;
pub mod stats;

pub use error::{Error, Result};
