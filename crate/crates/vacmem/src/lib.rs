//! Scenario runner, file formats and command line for `vacmem-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod emit;
pub mod scenario;

pub use config::{load_scenario, parse_scenario, ConfigError, Event, ScenarioConfig};
pub use emit::{emit, Format};
pub use scenario::{lifetime_table, run_scenario, RunError, RunResults};
