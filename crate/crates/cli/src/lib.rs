//! Scenario-driven front end for volume-fraction recovery: forward solves,
//! nonlocal boundary-condition residuals, estimates and sweeps.

pub mod commands;
pub mod error;
pub mod scenario;

pub use error::CliError;
pub use scenario::Scenario;
