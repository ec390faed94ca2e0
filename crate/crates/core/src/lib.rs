//! Simulation and effective-theory toolkit for a tripod-scheme cold atom whose
//! Dirac-like spin-orbit coupling is driven by an oscillating mirror.
//!
//! Units are dimensionless throughout (ħ = m = κ = 1); see [`units`].

pub mod dynamics;
pub mod efftheory;
pub mod observables;
mod spectral;
pub mod error;
pub mod experiment;
pub mod gauge;
pub mod spin;
pub mod state;
pub mod units;

pub use error::{Error, Result};
