//! Experiment harness behind the `gsco` binary.

pub mod config;
pub mod error;
pub mod run;
