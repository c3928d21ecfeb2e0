//! Config-driven runs of the `plapmix-core` solvers: a TOML run
//! description in, a JSON report and CSV plot data out.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod plotdata;
pub mod report;
pub mod run;
pub mod verify;

pub use config::{ConfigError, RunConfig, Setup, Task};
pub use report::{RunReport, Status, SCHEMA};
pub use run::{execute, RunArgs, RunOutput};
