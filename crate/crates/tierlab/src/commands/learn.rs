use std::io::Write;
use std::path::PathBuf;

use anyhow::Result;

use crate::cli::{Global, LearnArgs};
use crate::config::ExperimentConfig;
use crate::run::{write_run, Prepared};

/// Runs every seed and writes `<out>/<run-name>/seed_<n>.csv` plus `aggregate.csv`.
pub fn learn(args: &LearnArgs, global: &Global, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if global.horizon.is_some() {
        cfg.horizon = global.horizon;
    }
    let base = global
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("runs"));
    let prepared = Prepared::new(cfg)?;
    let dir = base.join(prepared.run_dir_name()?);
    let curves = prepared.run_all()?;
    let files = write_run(&dir, &curves)?;
    let n = curves.len() as f64;
    let first: f64 = curves
        .iter()
        .map(|(_, c)| c.steps_to_first_goal_or_total() as f64)
        .sum::<f64>()
        / n;
    let reached = curves
        .iter()
        .filter(|(_, c)| c.steps_to_first_goal.is_some())
        .count();
    writeln!(out, "{}", dir.display())?;
    writeln!(out, "files: {}", files.len())?;
    writeln!(out, "seeds reaching the goal: {reached}/{}", curves.len())?;
    writeln!(out, "mean steps to first goal: {first}")?;
    Ok(0)
}
