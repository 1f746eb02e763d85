use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{greedy_random_tie, sample_next, LearningCurve};
use crate::error::{Error, Result};
use crate::mdp::TierMdp;
use crate::reward::RewardModel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QLearnParams {
    pub alpha: f64,
    pub gamma: f64,
    pub q_init: f64,
    pub episodes: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl QLearnParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must be in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::InvalidParameter(format!(
                "gamma must be in [0, 1), got {}",
                self.gamma
            )));
        }
        if self.episodes == 0 || self.max_steps == 0 {
            return Err(Error::InvalidParameter(
                "episodes and max_steps must be positive".into(),
            ));
        }
        if !self.q_init.is_finite() {
            return Err(Error::InvalidParameter("q_init must be finite".into()));
        }
        Ok(())
    }
}

/// Greedy Q-learning with optimistic initialisation and random tie-breaking.
pub fn q_learning<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    params: &QLearnParams,
) -> Result<LearningCurve> {
    q_learning_with_table(mdp, reward, params).map(|(c, _)| c)
}

/// Like [`q_learning`] but also returns the final Q-table, indexed `s * n_actions + a`.
pub fn q_learning_with_table<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    params: &QLearnParams,
) -> Result<(LearningCurve, Vec<f64>)> {
    params.validate()?;
    let na = mdp.n_actions();
    let mut q = vec![params.q_init; mdp.n_states() * na];
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut curve = LearningCurve::default();
    let (alpha, gamma) = (params.alpha, params.gamma);
    for _ in 0..params.episodes {
        let mut s = mdp.start();
        let mut ret = 0.0;
        let mut disc = 1.0;
        let mut steps = 0;
        let mut terminal = None;
        if mdp.is_absorbing(s) {
            curve.push(mdp, 0, Some(s), reward.exit(s));
            continue;
        }
        while steps < params.max_steps {
            let a = greedy_random_tie(&mut rng, &q[s * na..(s + 1) * na]);
            let next = sample_next(&mut rng, mdp.row(s, a));
            let r = reward.transition(s, a, next);
            steps += 1;
            ret += disc * r;
            disc *= gamma;
            let target = if mdp.is_absorbing(next) {
                let x = reward.exit(next);
                ret += disc * x;
                r + gamma * x
            } else {
                r + gamma
                    * q[next * na..(next + 1) * na]
                        .iter()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max)
            };
            let cell = &mut q[s * na + a];
            *cell += alpha * (target - *cell);
            if mdp.is_absorbing(next) {
                terminal = Some(next);
                break;
            }
            s = next;
        }
        curve.push(mdp, steps, terminal, ret);
    }
    Ok((curve, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::tests::chain3;
    use crate::reward::{build_tiered_reward, StateReward};

    #[test]
    fn forced_path_reaches_goal_first_episode() {
        let mdp = chain3(0.9);
        let r = build_tiered_reward(3, 0.9, 0.1)
            .unwrap()
            .state_reward(&mdp)
            .unwrap();
        let params = QLearnParams {
            alpha: 0.9,
            gamma: 0.9,
            q_init: 0.0,
            episodes: 3,
            max_steps: 30,
            seed: 4,
        };
        let c = q_learning(&mdp, &r, &params).unwrap();
        assert_eq!(c.episodes[0].steps, 2);
        assert_eq!(c.episodes[0].terminal_tier, Some(3));
        assert_eq!(c.steps_to_first_goal, Some(2));
    }

    #[test]
    fn bad_alpha() {
        let mdp = chain3(0.9);
        let params = QLearnParams {
            alpha: 0.0,
            gamma: 0.9,
            q_init: 0.0,
            episodes: 1,
            max_steps: 1,
            seed: 0,
        };
        assert!(q_learning(&mdp, &StateReward(vec![0.0; 3]), &params).is_err());
    }
}
