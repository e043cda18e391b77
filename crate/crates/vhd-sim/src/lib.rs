//! Experiment driver around `vhd-core`: configuration files, the command
//! line, parallel restart scheduling, and CSV/JSON artifacts.
//!
//! Everything a run produces is deterministic in `(config, seed)` and
//! independent of the worker-thread count; output files carry a header with
//! the config hash so artifacts are traceable.

pub mod cli;
pub mod config;
pub mod error;
pub mod output;
pub mod params_io;
pub mod parallel;
pub mod run;
