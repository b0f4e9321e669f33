//! Command-line front end: configuration, subcommands and report files.

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{cmd_chain, cmd_partition, cmd_spectrum, cmd_verify, write_report};
pub use config::RunConfig;
pub use report::Report;
