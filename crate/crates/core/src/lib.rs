//! Exact computations on numerical classes of rational curves on Fano threefolds.

pub mod classification;
pub mod counting;
pub mod error;
pub mod invariants;
pub mod lattice;
pub mod mbb;
pub mod models;
pub mod monoid;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
