//! Multi-seed learning runs and their files.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;
use tierlab_core::learners::{
    default_max_steps, q_learning, rmax, LearningCurve, QLearnParams, RmaxParams,
};
use tierlab_core::reward::{
    action_penalty, build_tiered_reward, tier_based_shaping, ShapedReward, StateReward,
};
use tierlab_core::{RewardModel, TierMdp};

use crate::aggregate::AggregateCurve;
use crate::config::{ExperimentConfig, LearnerKind, RewardKind};
use crate::csvio;
use crate::maps::{load_world, LoadedWorld};

/// The three reward functions compared in the learning experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum LearningReward {
    State(StateReward),
    Shaped(ShapedReward),
}

impl RewardModel for LearningReward {
    fn transition(&self, state: usize, action: usize, next: usize) -> f64 {
        match self {
            LearningReward::State(r) => r.transition(state, action, next),
            LearningReward::Shaped(r) => r.transition(state, action, next),
        }
    }

    fn exit(&self, state: usize) -> f64 {
        match self {
            LearningReward::State(r) => r.exit(state),
            LearningReward::Shaped(r) => r.exit(state),
        }
    }
}

/// Tiered values come from the recursive construction with margin `delta`.
pub fn learning_reward(mdp: &TierMdp, kind: RewardKind, delta: f64) -> Result<LearningReward> {
    Ok(match kind {
        RewardKind::Tiered => LearningReward::State(
            build_tiered_reward(mdp.k(), mdp.gamma(), delta)?.state_reward(mdp)?,
        ),
        RewardKind::ActionPenalty => LearningReward::State(action_penalty(mdp)),
        RewardKind::TierShaping => LearningReward::Shaped(tier_based_shaping(
            mdp,
            &build_tiered_reward(mdp.k(), mdp.gamma(), delta)?,
        )?),
    })
}

/// Everything a run needs besides the seed.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ExperimentConfig,
    pub loaded: LoadedWorld,
    pub mdp: TierMdp,
    pub reward: LearningReward,
    pub max_steps: usize,
}

impl Prepared {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.check()?;
        let loaded = load_world(&config.env, config.map.as_deref())?;
        let mut mdp = loaded.tiered(config.tier_rule, config.k)?;
        if let Some(g) = config.gamma {
            mdp = mdp.with_gamma(g);
        }
        let reward = learning_reward(&mdp, config.reward, config.delta)?;
        let max_steps = config.horizon.unwrap_or_else(|| default_max_steps(&mdp));
        Ok(Prepared {
            config,
            loaded,
            mdp,
            reward,
            max_steps,
        })
    }

    pub fn run_seed(&self, seed: u64) -> Result<LearningCurve> {
        let c = &self.config;
        let gamma = self.mdp.gamma();
        let curve = match c.learner {
            LearnerKind::Qlearning => {
                let p = QLearnParams {
                    alpha: c.qlearning.alpha,
                    gamma,
                    q_init: c.qlearning.q_init,
                    episodes: c.episodes,
                    max_steps: self.max_steps,
                    seed,
                };
                q_learning(&self.mdp, &self.reward, &p)?
            }
            LearnerKind::Rmax => {
                let p = RmaxParams {
                    r_max: c.rmax.r_max,
                    m: c.rmax.m,
                    vi_iters: c.rmax.vi_iters,
                    gamma,
                    episodes: c.episodes,
                    max_steps: self.max_steps,
                    seed,
                };
                rmax(&self.mdp, &self.reward, &p)?
            }
        };
        Ok(curve)
    }

    /// All seeds in parallel; results come back in config order.
    pub fn run_all(&self) -> Result<Vec<(u64, LearningCurve)>> {
        self.config
            .seeds
            .par_iter()
            .map(|&s| self.run_seed(s).map(|c| (s, c)))
            .collect()
    }

    pub fn digest(&self) -> Result<String> {
        self.config.digest(&self.loaded.map_text)
    }

    /// `<env>-<reward>-<learner>-k<k>-<digest>`
    pub fn run_dir_name(&self) -> Result<String> {
        let c = &self.config;
        let reward = match c.reward {
            RewardKind::Tiered => "tiered",
            RewardKind::ActionPenalty => "action_penalty",
            RewardKind::TierShaping => "tier_shaping",
        };
        let learner = match c.learner {
            LearnerKind::Qlearning => "qlearning",
            LearnerKind::Rmax => "rmax",
        };
        Ok(format!(
            "{}-{reward}-{learner}-k{}-{}",
            c.env,
            self.mdp.k(),
            self.digest()?
        ))
    }
}

pub fn seed_file_name(seed: u64) -> String {
    format!("seed_{seed}.csv")
}

pub const AGGREGATE_FILE: &str = "aggregate.csv";

/// Writes one curve file per seed and, with two or more seeds, the aggregate.
/// Files are written one after another in seed order.
pub fn write_run(dir: &Path, curves: &[(u64, LearningCurve)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::with_capacity(curves.len() + 1);
    for (seed, curve) in curves {
        let p = dir.join(seed_file_name(*seed));
        csvio::write(&p, &csvio::curve_rows(*seed, curve))?;
        written.push(p);
    }
    if curves.len() >= 2 {
        let steps: Vec<Vec<usize>> = curves.iter().map(|(_, c)| c.steps()).collect();
        let p = dir.join(AGGREGATE_FILE);
        csvio::write(&p, &AggregateCurve::from_steps(&steps)?.rows())?;
        written.push(p);
    }
    Ok(written)
}
