//! Interference, outage and spectrum reuse of underlay D2D links sharing
//! the uplink of a single circular cell, analytically and by simulation.

pub mod config;
pub mod emit;
pub mod error;
pub mod geometry;
pub mod mgf;
pub mod mode_selection;
pub mod network;
pub mod outage;
pub mod simulator;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
