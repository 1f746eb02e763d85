//! Learning-experiment configuration, read from TOML.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::maps::RuleName;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RewardKind {
    Tiered,
    ActionPenalty,
    TierShaping,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    Qlearning,
    Rmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QLearningSection {
    pub alpha: f64,
    pub q_init: f64,
}

impl Default for QLearningSection {
    fn default() -> Self {
        QLearningSection {
            alpha: 0.9,
            q_init: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RmaxSection {
    pub r_max: f64,
    pub m: usize,
    pub vi_iters: usize,
}

impl Default for RmaxSection {
    fn default() -> Self {
        RmaxSection {
            r_max: 1e5,
            m: 3,
            vi_iters: 200,
        }
    }
}

fn default_delta() -> f64 {
    0.1
}

fn default_seeds() -> Vec<u64> {
    (0..30).collect()
}

/// One learning experiment. Unknown keys are rejected.
///
/// `horizon` caps the steps of each episode; when absent the cap is ten times
/// the state count. `gamma` defaults to the preset's discount.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub env: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tier_rule: Option<RuleName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub reward: RewardKind,
    #[serde(default = "default_delta")]
    pub delta: f64,
    pub learner: LearnerKind,
    pub episodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub qlearning: QLearningSection,
    #[serde(default)]
    pub rmax: RmaxSection,
}

impl ExperimentConfig {
    /// Parses and checks a config; a relative `map` is resolved against `base`.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self> {
        let mut cfg: ExperimentConfig = toml::from_str(text)?;
        if let (Some(m), Some(b)) = (&cfg.map, base) {
            if m.is_relative() {
                cfg.map = Some(b.join(m));
            }
        }
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text, path.parent()).with_context(|| format!("in {}", path.display()))
    }

    pub fn check(&self) -> Result<()> {
        if self.seeds.is_empty() {
            bail!("seeds must not be empty");
        }
        let distinct: BTreeSet<u64> = self.seeds.iter().copied().collect();
        if distinct.len() != self.seeds.len() {
            bail!("seeds must be distinct");
        }
        if self.episodes == 0 {
            bail!("episodes must be positive");
        }
        if self.horizon == Some(0) {
            bail!("horizon must be positive");
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            bail!("delta must be positive, got {}", self.delta);
        }
        if let Some(m) = &self.map {
            if !m.is_file() {
                bail!("map file {} does not exist", m.display());
            }
        }
        tierlab_core::envs::Preset::from_name(&self.env)?;
        Ok(())
    }

    /// First 16 hex digits of SHA-256 over the canonical config and the map text.
    pub fn digest(&self, map_text: &str) -> Result<String> {
        let mut canon = self.clone();
        canon.out = None;
        canon.map = None;
        let body = toml::to_string(&canon)?;
        let mut h = Sha256::new();
        h.update(body.as_bytes());
        h.update([0u8]);
        h.update(map_text.as_bytes());
        let hex: String = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Ok(hex[..16].to_string())
    }
}
