//! Command-line front end for the quantum radiation toolkit.

pub mod config;
pub mod output;
pub mod runner;
pub mod verify;

pub use config::{parse_scenario, render, validate, ConfigError, ConfigErrors, ScenarioConfig};
pub use runner::{run_scenario, ResultRecord};

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const VALIDATION: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const VERIFICATION: i32 = 3;
}
