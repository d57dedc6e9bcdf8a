//! Runner for the semiwave experiments.
//!
//! Reads a JSON [`config::RunConfig`], drives the numerical core in
//! `semiwave-core` and writes CSV tables, PGM snapshots and a `report.json`
//! with everything needed to reproduce the run.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
mod error;
pub mod io;
pub mod pgm;
pub mod run;

pub use config::{load_config, Experiment, RunConfig};
pub use error::AppError;
pub use run::{run, RunOptions};
