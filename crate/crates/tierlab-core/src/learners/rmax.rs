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
pub struct RmaxParams {
    pub r_max: f64,
    pub m: usize,
    pub vi_iters: usize,
    pub gamma: f64,
    pub episodes: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl RmaxParams {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidParameter("m must be at least 1".into()));
        }
        if !self.r_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "r_max must be finite, got {}",
                self.r_max
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
        Ok(())
    }
}

/// Learned model for a single RMAX run.
struct Model {
    na: usize,
    counts: Vec<usize>,
    /// Observed successors with counts, per known-or-learning pair.
    next: Vec<Vec<(usize, usize)>>,
    q: Vec<f64>,
}

impl Model {
    fn known(&self, sa: usize, m: usize) -> bool {
        self.counts[sa] >= m
    }

    /// Value-iteration sweeps over the known pairs; stops early once a sweep
    /// changes nothing.
    fn plan<R: RewardModel + ?Sized>(
        &mut self,
        mdp: &TierMdp,
        reward: &R,
        m: usize,
        sweeps: usize,
        gamma: f64,
    ) {
        let na = self.na;
        let mut v: Vec<f64> = (0..mdp.n_states())
            .map(|s| {
                if mdp.is_absorbing(s) {
                    reward.exit(s)
                } else {
                    self.q[s * na..(s + 1) * na]
                        .iter()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max)
                }
            })
            .collect();
        for _ in 0..sweeps {
            let mut change: f64 = 0.0;
            for s in 0..mdp.n_states() {
                if mdp.is_absorbing(s) {
                    continue;
                }
                for a in 0..na {
                    let sa = s * na + a;
                    if !self.known(sa, m) {
                        continue;
                    }
                    let n = self.counts[sa] as f64;
                    let q: f64 = self.next[sa]
                        .iter()
                        .map(|&(nx, c)| {
                            c as f64 / n * (reward.transition(s, a, nx) + gamma * v[nx])
                        })
                        .sum();
                    change = change.max((q - self.q[sa]).abs());
                    self.q[sa] = q;
                }
            }
            for s in 0..mdp.n_states() {
                if !mdp.is_absorbing(s) {
                    v[s] = self.q[s * na..(s + 1) * na]
                        .iter()
                        .copied()
                        .fold(f64::NEG_INFINITY, f64::max);
                }
            }
            if change == 0.0 {
                break;
            }
        }
    }
}

/// RMAX: unknown pairs are self-loops paying `r_max` until `m` samples are in.
pub fn rmax<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    params: &RmaxParams,
) -> Result<LearningCurve> {
    params.validate()?;
    let na = mdp.n_actions();
    let pairs = mdp.n_states() * na;
    let optimistic = params.r_max / (1.0 - params.gamma);
    let mut model = Model {
        na,
        counts: vec![0; pairs],
        next: vec![Vec::new(); pairs],
        q: vec![optimistic; pairs],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut curve = LearningCurve::default();
    let gamma = params.gamma;
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
            let a = greedy_random_tie(&mut rng, &model.q[s * na..(s + 1) * na]);
            let next = sample_next(&mut rng, mdp.row(s, a));
            let r = reward.transition(s, a, next);
            steps += 1;
            ret += disc * r;
            disc *= gamma;
            let sa = s * na + a;
            if !model.known(sa, params.m) {
                model.counts[sa] += 1;
                match model.next[sa].iter_mut().find(|(n, _)| *n == next) {
                    Some(e) => e.1 += 1,
                    None => model.next[sa].push((next, 1)),
                }
                if model.known(sa, params.m) {
                    model.plan(mdp, reward, params.m, params.vi_iters, gamma);
                }
            }
            if mdp.is_absorbing(next) {
                ret += disc * reward.exit(next);
                terminal = Some(next);
                break;
            }
            s = next;
        }
        curve.push(mdp, steps, terminal, ret);
    }
    Ok(curve)
}

/// Planning value of a pair before any samples.
pub fn unknown_value(params: &RmaxParams) -> f64 {
    params.r_max / (1.0 - params.gamma)
}
