//! Preset lookup, map files and tier assignment.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use tierlab_core::envs::{GridWorld, Preset, TierAssignment, TierRule};
use tierlab_core::TierMdp;

pub const MAPS_ENV: &str = "TIERLAB_MAPS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum RuleName {
    L1ToGoal,
    WeightedL1,
    FlagsCollected,
}

impl RuleName {
    pub fn rule(self) -> TierRule {
        match self {
            RuleName::L1ToGoal => TierRule::L1ToGoal,
            RuleName::WeightedL1 => TierRule::weighted_l1(),
            RuleName::FlagsCollected => TierRule::FlagsCollected,
        }
    }
}

/// Where a world's map text came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MapSource {
    Builtin,
    File(PathBuf),
}

/// A parsed world plus the map text it was built from.
#[derive(Debug, Clone)]
pub struct LoadedWorld {
    pub preset: Preset,
    pub world: GridWorld,
    pub map_text: String,
    pub source: MapSource,
}

/// Map text for `preset`: an explicit file wins, then `$TIERLAB_MAPS/<name>.txt`,
/// then the built-in layout.
pub fn load_world(preset_name: &str, map: Option<&Path>) -> Result<LoadedWorld> {
    let preset = Preset::from_name(preset_name)?;
    let dir = std::env::var_os(MAPS_ENV).map(PathBuf::from);
    let (map_text, source) = match (map, dir) {
        (Some(p), _) => (read_map(p)?, MapSource::File(p.to_path_buf())),
        (None, Some(d)) => {
            let p = d.join(format!("{}.txt", preset.name()));
            (
                read_map(&p).with_context(|| format!("{MAPS_ENV} is set"))?,
                MapSource::File(p),
            )
        }
        (None, None) => (preset.builtin_map().to_string(), MapSource::Builtin),
    };
    let world = GridWorld::parse(&preset.spec_with_map(map_text.clone()))
        .with_context(|| format!("building {}", preset.name()))?;
    Ok(LoadedWorld {
        preset,
        world,
        map_text,
        source,
    })
}

fn read_map(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).with_context(|| format!("reading map {}", p.display()))
}

impl LoadedWorld {
    pub fn rule(&self, rule: Option<RuleName>) -> TierRule {
        rule.map_or_else(|| self.preset.default_rule(), RuleName::rule)
    }

    pub fn k(&self, k: Option<usize>) -> usize {
        k.unwrap_or_else(|| self.preset.default_k())
    }

    pub fn tiered(&self, rule: Option<RuleName>, k: Option<usize>) -> Result<TierMdp> {
        let assignment = TierAssignment {
            rule: self.rule(rule),
            k: self.k(k),
        };
        Ok(self.world.assign_tiers(&assignment)?)
    }
}

/// Tier indices per cell, walls as `#`, tokens separated by spaces.
pub fn render_tier_map(world: &GridWorld, mdp: &TierMdp) -> String {
    let mut s = String::new();
    for row in world.tier_map(mdp) {
        let line: Vec<String> = row
            .iter()
            .map(|t| t.map_or_else(|| "#".to_string(), |t| t.to_string()))
            .collect();
        s.push_str(&line.join(" "));
        s.push('\n');
    }
    s
}
