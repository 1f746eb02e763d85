//! Tier MDPs, Tiered Reward construction, exact Pareto analysis of
//! deterministic policies, and tabular learners.
//!
//! The crate is `no_std` with `alloc`. Enable `std` for `std::error::Error`
//! impls and `parallel` for multi-threaded front enumeration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod envs;
pub mod error;
pub mod learners;
pub mod linalg;
pub mod mdp;
pub mod occupancy;
pub mod pareto;
pub mod planning;
pub mod random;
pub mod reward;

pub use error::{Error, Result};
pub use mdp::{DeterministicPolicy, PolicySpace, Tier, TierMdp, TierMdpParts, Violation};
pub use occupancy::{
    absorption_probabilities, cumulative_tier_occupancy, reach_stats, tier_occupancy_stats,
    Absorption, PolicyStats,
};
pub use pareto::{dominates, pareto_front, DominanceVerdict, ParetoFront, Relation};
pub use planning::{evaluate_policy, value_iteration, Terminal, ViOptions, ViSolution};
pub use reward::{
    action_penalty, build_tiered_reward, check_tiered_3, check_tiered_k, scale_to_unit,
    tier_based_shaping, RewardModel, ShapedReward, StateReward, TierRewardVector,
};
