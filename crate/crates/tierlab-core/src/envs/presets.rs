//! Named environments with pinned dynamics and default tiers.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::grid::{ActionSet, Dynamics, GridSpec, GridWorld};
use super::tiers::{TierAssignment, TierRule};
use crate::error::{Error, Result};
use crate::mdp::TierMdp;

pub const PRESET_NAMES: [&str; 6] = [
    "russell_norvig",
    "flag_grid",
    "chain",
    "grid",
    "frozen_lake",
    "wall_grid",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    RussellNorvig,
    FlagGrid,
    Chain,
    Grid,
    FrozenLake,
    WallGrid,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::RussellNorvig,
        Preset::FlagGrid,
        Preset::Chain,
        Preset::Grid,
        Preset::FrozenLake,
        Preset::WallGrid,
    ];

    pub fn from_name(name: &str) -> Result<Preset> {
        Ok(match name {
            "russell_norvig" => Preset::RussellNorvig,
            "flag_grid" => Preset::FlagGrid,
            "chain" => Preset::Chain,
            "grid" => Preset::Grid,
            "frozen_lake" => Preset::FrozenLake,
            "wall_grid" => Preset::WallGrid,
            other => return Err(Error::UnknownPreset(other.to_string())),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::RussellNorvig => "russell_norvig",
            Preset::FlagGrid => "flag_grid",
            Preset::Chain => "chain",
            Preset::Grid => "grid",
            Preset::FrozenLake => "frozen_lake",
            Preset::WallGrid => "wall_grid",
        }
    }

    /// The map shipped with the library.
    pub fn builtin_map(self) -> &'static str {
        match self {
            Preset::RussellNorvig => include_str!("../../../../maps/russell_norvig.txt"),
            Preset::FlagGrid => include_str!("../../../../maps/flag_grid.txt"),
            Preset::Chain => include_str!("../../../../maps/chain.txt"),
            Preset::Grid => include_str!("../../../../maps/grid.txt"),
            Preset::FrozenLake => include_str!("../../../../maps/frozen_lake.txt"),
            Preset::WallGrid => include_str!("../../../../maps/wall_grid.txt"),
        }
    }

    pub fn dynamics(self) -> Dynamics {
        match self {
            Preset::RussellNorvig | Preset::Grid | Preset::WallGrid => Dynamics::SlipSides {
                p_succeed: 0.8,
                p_each_side: 0.1,
            },
            Preset::FlagGrid => Dynamics::UniformRandom {
                p_succeed: 0.8,
                p_random: 0.2,
            },
            Preset::Chain => Dynamics::Opposite { p_succeed: 0.8 },
            Preset::FrozenLake => Dynamics::SlipSides {
                p_succeed: 1.0 / 3.0,
                p_each_side: 1.0 / 3.0,
            },
        }
    }

    pub fn actions(self) -> ActionSet {
        match self {
            Preset::Chain => ActionSet::Horizontal2,
            _ => ActionSet::Cardinal4,
        }
    }

    pub fn gamma(self) -> f64 {
        0.9
    }

    pub fn default_rule(self) -> TierRule {
        match self {
            Preset::FlagGrid => TierRule::FlagsCollected,
            Preset::FrozenLake | Preset::WallGrid => TierRule::weighted_l1(),
            _ => TierRule::L1ToGoal,
        }
    }

    pub fn default_k(self) -> usize {
        match self {
            Preset::FlagGrid => 6,
            _ => 3,
        }
    }

    pub fn spec_with_map(self, map: String) -> GridSpec {
        GridSpec {
            name: self.name().to_string(),
            map,
            dynamics: self.dynamics(),
            actions: self.actions(),
            gamma: self.gamma(),
        }
    }

    pub fn spec(self) -> GridSpec {
        self.spec_with_map(self.builtin_map().to_string())
    }

    pub fn world(self) -> Result<GridWorld> {
        GridWorld::parse(&self.spec())
    }
}

/// Builds a preset with its default tier assignment.
pub fn make_preset(name: &str) -> Result<TierMdp> {
    let p = Preset::from_name(name)?;
    p.world()?.assign_tiers(&TierAssignment {
        rule: p.default_rule(),
        k: p.default_k(),
    })
}

/// Builds a preset with `k` tiers under its default rule.
pub fn make_preset_k(name: &str, k: usize) -> Result<TierMdp> {
    let p = Preset::from_name(name)?;
    p.world()?.assign_tiers(&TierAssignment {
        rule: p.default_rule(),
        k,
    })
}

pub fn preset_names() -> Vec<&'static str> {
    PRESET_NAMES.to_vec()
}
