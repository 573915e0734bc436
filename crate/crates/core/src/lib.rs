//! Directed (northeast) first-passage percolation on the square lattice,
//! oriented bond percolation with its right edge, and the directed growth
//! model, with the Monte Carlo estimators used to check the phase structure of
//! the time constant.

pub mod distributions;
pub mod error;
pub mod estimators;
pub mod growth;
pub mod lattice;
pub mod output;
pub mod oriented;
pub mod passage;
pub mod rng;
pub mod stats;
pub mod suites;

pub use error::{Error, Result};
