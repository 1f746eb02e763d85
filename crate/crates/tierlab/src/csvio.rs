//! CSV schemas. Floats are written in shortest round-trip form.

use std::path::Path;

use anyhow::{Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tierlab_core::learners::LearningCurve;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub seed: u64,
    pub episode: usize,
    pub steps: usize,
    /// Empty when the episode hit the step cap.
    pub terminal_tier: Option<usize>,
    #[serde(rename = "return")]
    pub ret: f64,
    pub cum_env_steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub episode: usize,
    pub mean_steps: f64,
    pub std_steps: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRow {
    pub t: usize,
    pub upper: f64,
    pub lower: f64,
    pub policy_id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FractionRow {
    pub n_samples: usize,
    pub n_dominated: usize,
    pub fraction: f64,
    pub seed: u64,
}

pub const CURVE_HEADER: &str = "seed,episode,steps,terminal_tier,return,cum_env_steps";
pub const AGGREGATE_HEADER: &str = "episode,mean_steps,std_steps,n_seeds";
pub const SERIES_HEADER: &str = "t,upper,lower,policy_id";
pub const FRACTION_HEADER: &str = "n_samples,n_dominated,fraction,seed";

/// Episodes are numbered from 1.
pub fn curve_rows(seed: u64, curve: &LearningCurve) -> Vec<CurveRow> {
    curve
        .episodes
        .iter()
        .enumerate()
        .map(|(i, e)| CurveRow {
            seed,
            episode: i + 1,
            steps: e.steps,
            terminal_tier: e.terminal_tier,
            ret: e.discounted_return,
            cum_env_steps: e.cum_env_steps,
        })
        .collect()
}

pub fn to_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| anyhow::anyhow!("csv flush: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

pub fn from_str<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn write<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    std::fs::write(path, to_string(rows)?).with_context(|| format!("writing {}", path.display()))
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
