//! Configuration-driven front end: reads a TOML scenario, runs the model
//! and writes CSV data, a JSON summary and a gnuplot script.

pub mod catalog;
pub mod config;
pub mod error;
pub mod output;
pub mod run;

pub use config::{Scenario, ScenarioConfig};
pub use error::CliError;
