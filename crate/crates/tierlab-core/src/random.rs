//! Random small tier MDPs for property checks.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{TierMdp, TierMdpParts};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomMdpConfig {
    pub n_states: usize,
    pub n_actions: usize,
    pub k: usize,
    /// Most successors per `(state, action)`.
    pub max_branch: usize,
    pub gamma: f64,
}

/// A random goal/obstacle MDP: tier 1 and tier `k` are absorbing, every
/// middle tier holds at least one non-absorbing state, and state 0 (the
/// start) sits in tier 2.
pub fn random_tier_mdp<R: Rng + ?Sized>(rng: &mut R, cfg: &RandomMdpConfig) -> Result<TierMdp> {
    let RandomMdpConfig {
        n_states: n,
        n_actions,
        k,
        max_branch,
        gamma,
    } = *cfg;
    if k < 3 || n < k || n_actions == 0 || max_branch == 0 {
        return Err(Error::InvalidParameter(format!(
            "cannot build a {k}-tier MDP on {n} states"
        )));
    }
    // one state per tier first, the rest spread over the middle tiers
    let mut tier_of: Vec<usize> = vec![2, 1, k];
    tier_of.extend(3..k);
    while tier_of.len() < n {
        tier_of.push(rng.gen_range(2..k));
    }
    tier_of[3..].shuffle(rng);
    let absorbing: Vec<bool> = tier_of.iter().map(|&t| t == 1 || t == k).collect();
    let all: Vec<usize> = (0..n).collect();
    let mut rows = Vec::with_capacity(n * n_actions);
    for s in 0..n {
        for _ in 0..n_actions {
            if absorbing[s] {
                rows.push(vec![(s, 1.0)]);
                continue;
            }
            let b = rng.gen_range(1..=max_branch.min(n));
            let next: Vec<usize> = all.choose_multiple(rng, b).copied().collect();
            let w: Vec<f64> = (0..b).map(|_| rng.gen_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            let mut row: Vec<(usize, f64)> =
                next.into_iter().zip(w.iter().map(|x| x / total)).collect();
            // put rounding slack on the last entry so the row sums to one
            let head: f64 = row[..b - 1].iter().map(|e| e.1).sum();
            row[b - 1].1 = 1.0 - head;
            rows.push(row);
        }
    }
    TierMdp::new(TierMdpParts {
        n_states: n,
        n_actions,
        rows,
        tier_of,
        k,
        gamma,
        absorbing,
        start: 0,
        goal_obstacle: true,
    })
}
