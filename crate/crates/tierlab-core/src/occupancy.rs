//! Exact reach curves of a fixed policy: forward propagation of the state
//! distribution with first-visit accounting, and hitting probabilities from
//! linear solves.
//!
//! The first-visit probability of tier `d` at step `t` is the mass that enters
//! tier `d` at `t` when tier `d` is made a sink. For an absorbing tier this is
//! plain absorption, so a single pass tallies the goal and obstacle tiers
//! together when both are absorbing.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Dense;
use crate::mdp::{DeterministicPolicy, Tier, TierMdp};

pub const DEFAULT_HORIZON: usize = 400;

/// Reach statistics of one policy from the start state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyStats {
    pub horizon: usize,
    /// `cum_goal[t]`: probability of having entered tier `k` by step `t`.
    pub cum_goal: Vec<f64>,
    /// `cum_obstacle[t]`: probability of having entered tier 1 by step `t`.
    pub cum_obstacle: Vec<f64>,
    /// `first_visit[d - 1][t]`: probability of entering tier `d` for the first
    /// time at step `t`. Empty when computed by [`reach_stats`].
    pub first_visit: Vec<Vec<f64>>,
    /// Probability of ever entering tier `d`, indexed `d - 1`. Empty when
    /// computed by [`reach_stats`].
    pub limit_tier: Vec<f64>,
    pub limit_goal: f64,
    pub limit_obstacle: f64,
}

impl PolicyStats {
    /// `p[t][d]` for a 1-based tier `d`.
    pub fn first_visit_at(&self, t: usize, d: Tier) -> f64 {
        self.first_visit[d - 1][t]
    }

    /// Cumulative first-visit curve of tier `d`.
    pub fn cum_first_visit(&self, d: Tier) -> Vec<f64> {
        cumsum(&self.first_visit[d - 1])
    }
}

/// Limiting reach probabilities from the start state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Absorption {
    pub goal: f64,
    pub obstacle: f64,
    /// Mass that never reaches the goal or obstacle tier.
    pub never: f64,
}

fn cumsum(xs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    xs.iter()
        .map(|x| {
            acc += x;
            acc
        })
        .collect()
}

/// Per-step entry mass into each of `targets` (disjoint state sets), with every
/// target made a sink. Returns one series of length `horizon + 1` per target.
fn propagate_sinks(
    mdp: &TierMdp,
    policy: &DeterministicPolicy,
    targets: &[&[bool]],
    horizon: usize,
) -> Vec<Vec<f64>> {
    let n = mdp.n_states();
    let chain = mdp.chain_under(policy);
    let mut out = vec![vec![0.0; horizon + 1]; targets.len()];
    let mut dist = vec![0.0; n];
    let mut next = vec![0.0; n];
    dist[mdp.start()] = 1.0;
    let settle = |dist: &mut [f64], out: &mut Vec<Vec<f64>>, t: usize| -> f64 {
        let mut live = 0.0;
        for (s, m) in dist.iter_mut().enumerate() {
            if *m == 0.0 {
                continue;
            }
            if let Some(j) = targets.iter().position(|set| set[s]) {
                out[j][t] += *m;
                *m = 0.0;
            } else {
                live += *m;
            }
        }
        live
    };
    let mut live = settle(&mut dist, &mut out, 0);
    for t in 1..=horizon {
        if live == 0.0 {
            break;
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (s, &m) in dist.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for &(nx, p) in chain[s] {
                next[nx] += m * p;
            }
        }
        core::mem::swap(&mut dist, &mut next);
        live = settle(&mut dist, &mut out, t);
    }
    out
}

fn tier_mask(mdp: &TierMdp, d: Tier) -> Vec<bool> {
    mdp.tiers().iter().map(|&t| t == d).collect()
}

fn tier_absorbing(mdp: &TierMdp, d: Tier) -> bool {
    (0..mdp.n_states())
        .filter(|&s| mdp.tier(s) == d)
        .all(|s| mdp.is_absorbing(s))
}

/// Probability of ever entering `target` from the start state under `policy`.
pub fn hitting_probability(mdp: &TierMdp, policy: &DeterministicPolicy, target: &[bool]) -> f64 {
    let n = mdp.n_states();
    let start = mdp.start();
    if target[start] {
        return 1.0;
    }
    let chain = mdp.chain_under(policy);
    // forward reachability from start, stopping at targets
    let mut reach = vec![false; n];
    let mut stack = vec![start];
    reach[start] = true;
    while let Some(s) = stack.pop() {
        if target[s] {
            continue;
        }
        for &(nx, p) in chain[s] {
            if p > 0.0 && !reach[nx] {
                reach[nx] = true;
                stack.push(nx);
            }
        }
    }
    // backward: which reachable non-target states can reach a target
    let mut can = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for s in 0..n {
            if !reach[s] || target[s] || can[s] {
                continue;
            }
            if chain[s]
                .iter()
                .any(|&(nx, p)| p > 0.0 && (target[nx] || can[nx]))
            {
                can[s] = true;
                changed = true;
            }
        }
    }
    if !can[start] {
        return 0.0;
    }
    let idx: Vec<usize> = (0..n).filter(|&s| can[s]).collect();
    let mut pos = vec![usize::MAX; n];
    for (i, &s) in idx.iter().enumerate() {
        pos[s] = i;
    }
    let mut m = Dense::identity(idx.len());
    let mut b = vec![0.0; idx.len()];
    for (i, &s) in idx.iter().enumerate() {
        for &(nx, p) in chain[s] {
            if target[nx] {
                b[i] += p;
            } else if can[nx] {
                m[(i, pos[nx])] -= p;
            }
        }
    }
    let h = m
        .solve(b)
        .expect("every retained state leaves the transient set");
    h[pos[start]].clamp(0.0, 1.0)
}

/// Goal and obstacle reach probabilities in the limit `t -> infinity`.
pub fn absorption_probabilities(mdp: &TierMdp, policy: &DeterministicPolicy) -> Absorption {
    let goal = hitting_probability(mdp, policy, &tier_mask(mdp, mdp.k()));
    let obstacle = hitting_probability(mdp, policy, &tier_mask(mdp, 1));
    Absorption {
        goal,
        obstacle,
        never: (1.0 - goal - obstacle).max(0.0),
    }
}

/// Goal and obstacle curves only (no per-tier detail).
pub fn reach_stats(mdp: &TierMdp, policy: &DeterministicPolicy, horizon: usize) -> PolicyStats {
    let k = mdp.k();
    let goal = tier_mask(mdp, k);
    let obstacle = tier_mask(mdp, 1);
    let (g, o) = if tier_absorbing(mdp, k) && tier_absorbing(mdp, 1) {
        let mut r = propagate_sinks(mdp, policy, &[&goal, &obstacle], horizon);
        let o = r.pop().unwrap();
        (r.pop().unwrap(), o)
    } else {
        let g = propagate_sinks(mdp, policy, &[&goal], horizon)
            .pop()
            .unwrap();
        let o = propagate_sinks(mdp, policy, &[&obstacle], horizon)
            .pop()
            .unwrap();
        (g, o)
    };
    PolicyStats {
        horizon,
        cum_goal: cumsum(&g),
        cum_obstacle: cumsum(&o),
        first_visit: Vec::new(),
        limit_tier: Vec::new(),
        limit_goal: hitting_probability(mdp, policy, &goal),
        limit_obstacle: hitting_probability(mdp, policy, &obstacle),
    }
}

/// Full statistics including first-visit distributions of every tier.
pub fn tier_occupancy_stats(
    mdp: &TierMdp,
    policy: &DeterministicPolicy,
    horizon: usize,
) -> PolicyStats {
    let k = mdp.k();
    let masks: Vec<Vec<bool>> = (1..=k).map(|d| tier_mask(mdp, d)).collect();
    let first_visit: Vec<Vec<f64>> = masks
        .iter()
        .map(|m| propagate_sinks(mdp, policy, &[m], horizon).pop().unwrap())
        .collect();
    let limit_tier: Vec<f64> = masks
        .iter()
        .map(|m| hitting_probability(mdp, policy, m))
        .collect();
    PolicyStats {
        horizon,
        cum_goal: cumsum(&first_visit[k - 1]),
        cum_obstacle: cumsum(&first_visit[0]),
        limit_goal: limit_tier[k - 1],
        limit_obstacle: limit_tier[0],
        first_visit,
        limit_tier,
    }
}

/// Expected visits to each tier over steps `0..=t`, for every `t <= horizon`;
/// `out[d - 1][t]` is tier `d`'s. Absorbing states keep their mass, so the
/// per-step tier masses sum to one.
pub fn cumulative_tier_occupancy(
    mdp: &TierMdp,
    policy: &DeterministicPolicy,
    horizon: usize,
) -> Vec<Vec<f64>> {
    let n = mdp.n_states();
    let mut dist = vec![0.0; n];
    dist[mdp.start()] = 1.0;
    let mut next = vec![0.0; n];
    let mut acc = vec![0.0; mdp.k()];
    let mut out = vec![Vec::with_capacity(horizon + 1); mdp.k()];
    for _ in 0..=horizon {
        for (s, &p) in dist.iter().enumerate() {
            acc[mdp.tier(s) - 1] += p;
        }
        for (d, a) in acc.iter().enumerate() {
            out[d].push(*a);
        }
        next.iter_mut().for_each(|x| *x = 0.0);
        for (s, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            if mdp.is_absorbing(s) {
                next[s] += p;
                continue;
            }
            for &(x, q) in mdp.row(s, policy.action(s)) {
                next[x] += p * q;
            }
        }
        core::mem::swap(&mut dist, &mut next);
    }
    out
}
