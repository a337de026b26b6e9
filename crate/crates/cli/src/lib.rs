//! Scenario runner, operator comparison and verification front end for the
//! `revbench` command.

pub mod commands;
pub mod runner;
pub mod scenario;
pub mod templates;

pub use runner::{compare, run_scenario, Comparison, RunError, RunResult};
pub use scenario::{ParseError, Scenario};
