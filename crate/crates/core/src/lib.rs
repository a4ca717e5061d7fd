//! Numerical toolkit for Gaussian perturbations `S = M + eps H` of hard-edge
//! random matrix ensembles.

pub mod ensembles;
pub mod error;
pub mod freeconv;
pub mod kernels;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
