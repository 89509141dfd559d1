//! Random prime models and Bateman-Horn-type predictions, checkable at desk
//! scale: exact local root counts, truncated singular series, segmented
//! residue sieves, seeded random-set models, and exact expectation oracles.

pub mod error;
pub mod localroots;
mod modpoly;
pub mod polyarith;
pub mod rng;
pub mod sieve;
pub mod singular;

pub use error::{BhError, Result};
