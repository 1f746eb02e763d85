//! Subcommand bodies. Each writes its report to `out` and returns the exit code.

mod design;
mod learn;
mod pareto;
mod tiermap;
mod validate;

pub use design::{design, design_values};
pub use learn::learn;
pub use pareto::{pareto, FrontRow, SampleRow};
pub use tiermap::tiermap;
pub use validate::validate;

use std::io::Write;

use anyhow::Result;

use crate::cli::{Cli, Command};

pub fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Design(a) => design(a, &cli.global, out),
        Command::Validate(a) => validate(a, out),
        Command::Pareto(a) => pareto(a, &cli.global, out),
        Command::Learn(a) => learn(a, &cli.global, out),
        Command::Tiermap(a) => tiermap(a, &cli.global, out),
    }
}
