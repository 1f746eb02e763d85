//! Tabular learners and their learning curves.

mod qlearning;
mod rmax;

pub use qlearning::{q_learning, q_learning_with_table, QLearnParams};
pub use rmax::{rmax, unknown_value, RmaxParams};

use alloc::vec::Vec;

use rand::Rng;

use crate::mdp::{Tier, TierMdp};

/// Episode cap used when none is given: ten times the state count.
pub fn default_max_steps(mdp: &TierMdp) -> usize {
    10 * mdp.n_states()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub steps: usize,
    /// Tier of the absorbing state that ended the episode; `None` on timeout.
    pub terminal_tier: Option<Tier>,
    pub discounted_return: f64,
    /// Environment steps taken so far, this episode included.
    pub cum_env_steps: u64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LearningCurve {
    pub episodes: Vec<EpisodeRecord>,
    /// Environment steps up to and including the first entry into the goal tier.
    pub steps_to_first_goal: Option<u64>,
}

impl LearningCurve {
    pub fn steps(&self) -> Vec<usize> {
        self.episodes.iter().map(|e| e.steps).collect()
    }

    /// Steps to first goal, or the total step count when the goal was never reached.
    pub fn steps_to_first_goal_or_total(&self) -> u64 {
        self.steps_to_first_goal
            .unwrap_or_else(|| self.episodes.last().map_or(0, |e| e.cum_env_steps))
    }

    fn push(&mut self, mdp: &TierMdp, steps: usize, terminal: Option<usize>, ret: f64) {
        let prev = self.episodes.last().map_or(0, |e| e.cum_env_steps);
        let cum = prev + steps as u64;
        let terminal_tier = terminal.map(|s| mdp.tier(s));
        if self.steps_to_first_goal.is_none() && terminal_tier == Some(mdp.k()) {
            self.steps_to_first_goal = Some(cum);
        }
        self.episodes.push(EpisodeRecord {
            steps,
            terminal_tier,
            discounted_return: ret,
            cum_env_steps: cum,
        });
    }
}

/// Draws a successor from a sparse row.
pub(crate) fn sample_next<R: Rng + ?Sized>(rng: &mut R, row: &[(usize, f64)]) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(n, p) in row {
        acc += p;
        if u < acc {
            return n;
        }
    }
    row.last().expect("empty transition row").0
}

/// Greedy action with ties (exact equality) broken uniformly at random.
pub(crate) fn greedy_random_tie<R: Rng + ?Sized>(rng: &mut R, q: &[f64]) -> usize {
    let best = q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let n_best = q.iter().filter(|&&x| x == best).count();
    if n_best <= 1 {
        return q.iter().position(|&x| x == best).unwrap_or(0);
    }
    let pick = rng.gen_range(0..n_best);
    q.iter()
        .enumerate()
        .filter(|&(_, &x)| x == best)
        .nth(pick)
        .map(|(a, _)| a)
        .unwrap()
}
