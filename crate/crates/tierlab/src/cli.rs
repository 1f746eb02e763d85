use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::maps::RuleName;

#[derive(Debug, Parser)]
#[command(
    name = "tierlab",
    version,
    about = "Tiered reward design, Pareto analysis and tabular learning runs"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for anything sampled.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory for output files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Dominance horizon for `pareto`; per-episode step cap for `learn`.
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a k-tier reward vector.
    Design(DesignArgs),
    /// Check a reward file against the tiered-reward inequalities.
    Validate(ValidateArgs),
    /// Pareto front, theorem checks and dominated fractions on a preset.
    Pareto(ParetoArgs),
    /// Run a learning experiment from a TOML config.
    Learn(LearnArgs),
    /// Print the tier index of every cell.
    Tiermap(TiermapArgs),
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(short = 'k')]
    pub k: usize,
    /// Read as an exact decimal.
    #[arg(long, default_value = "0.9")]
    pub gamma: String,
    #[arg(long, default_value = "0.1")]
    pub delta: String,
    /// Divide by |r_1| so values lie in [-1, 0].
    #[arg(long)]
    pub scale: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub file: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    /// Use the k-tier chain (ending in r_k <= 0) even for three values.
    #[arg(long)]
    pub chain: bool,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("mode").required(true).args(["front", "check_theorems", "random_rewards"])))]
pub struct ParetoArgs {
    pub env: String,
    #[arg(long)]
    pub map: Option<PathBuf>,
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    /// Largest policy space to enumerate.
    #[arg(long, default_value_t = tierlab_core::pareto::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long)]
    pub front: bool,
    #[arg(long)]
    pub check_theorems: bool,
    /// Number of sampled ordered rewards.
    #[arg(long, value_name = "N")]
    pub random_rewards: Option<usize>,
    /// Sampling interval for `--random-rewards`.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [-1.0, 1.0])]
    pub bounds: Vec<f64>,
    /// Sampled tiered rewards per theorem check.
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Margin of the constructed k-tier reward checked by `--check-theorems`.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
}

#[derive(Debug, Args)]
pub struct LearnArgs {
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct TiermapArgs {
    pub env: String,
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleName>,
    #[arg(long)]
    pub map: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_bounds_parse() {
        let cli = Cli::try_parse_from([
            "tierlab",
            "pareto",
            "russell_norvig",
            "--random-rewards",
            "5",
            "--bounds",
            "-2",
            "1",
        ])
        .unwrap();
        let Command::Pareto(p) = cli.command else {
            panic!()
        };
        assert_eq!(p.bounds, vec![-2.0, 1.0]);
    }

    #[test]
    fn pareto_needs_a_mode() {
        assert!(Cli::try_parse_from(["tierlab", "pareto", "russell_norvig"]).is_err());
    }
}
