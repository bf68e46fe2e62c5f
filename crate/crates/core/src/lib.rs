//! Logical error rate estimation for the planar surface code.
//!
//! Arbitrary gate error models are reduced to a handful of rates per error
//! type, looked up in a Monte Carlo database of small-distance logical error
//! rates, and extrapolated to any code distance.

pub mod error;
pub mod error_model;
pub mod estimator;
pub mod exec;
pub mod matcher;
pub mod ratedb;
pub mod surface_sim;

pub use error::{Error, Result};
pub use exec::Execution;
