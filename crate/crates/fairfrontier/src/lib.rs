//! File formats, parallel execution and the command-line driver for
//! `fairfrontier-core`.
//!
//! The `fairfrontier` binary exposes four commands:
//!
//! * `run` sweeps a classifier family and writes `sweep.csv`, `frontier.csv`,
//!   `report.txt`, `decomposition.csv`, `theorems.txt`, `theorems.json` and
//!   SVG figures.
//! * `scenarios` lists the presets and can write them as scenario files.
//! * `check` runs the structural checks only.
//! * `oracle` compares analytic values with Monte-Carlo estimates.
//!
//! Exit status is 0 on success, 1 when a check fails, 2 for invalid input
//! and 3 when a resource limit would be exceeded.

pub mod analysis;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod output;
pub mod plot;
pub mod scenario_file;

pub use error::{CliError, Result};
