//! Deterministic, seedable simulator for row-structured vineyard field work.
//!
//! Three operator types — a walking scout, an immersive-interface robot, and
//! a dual-camera robot — scan a vineyard for infected spots and then treat
//! them. Memory-less agents must re-traverse the whole field in the second
//! phase; memory-capable agents revisit only the recorded coordinates via a
//! row-constrained tour. A Monte Carlo harness aggregates completion times
//! over seeded trials, and a yield-map mode surveys low-yield zone epicenters
//! instead of infection spots.

pub mod agents;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod field;
pub mod phase;
pub mod report;
pub mod routing;
pub mod svg;

pub use error::{Error, Result};
