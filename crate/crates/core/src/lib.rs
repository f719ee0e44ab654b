//! Discrete toolkit for the curve-side and surface-side characterizations of
//! the 1-Poincaré inequality on metric measure spaces.

pub mod cli;
pub mod error;
pub mod euclid;
pub mod gallery;
pub mod lp;
pub mod mmspace;
pub mod modulus;
pub mod netflow;
pub mod riesz;
pub mod separating;
pub mod shortest;

pub use error::{Error, Result};
