//! File formats, experiment configs and subcommands behind the `tierlab` binary.

pub mod aggregate;
pub mod cli;
pub mod commands;
pub mod config;
pub mod csvio;
pub mod exact;
pub mod maps;
pub mod numfmt;
pub mod rewardfile;
pub mod run;
