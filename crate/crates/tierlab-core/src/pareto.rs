//! Policy dominance, exhaustive Pareto fronts and the checks built on them.
//!
//! Policy `a` dominates `b` when `a`'s cumulative goal curve is never below
//! `b`'s, its cumulative obstacle curve is never above `b`'s, and the two are
//! not identical. The infinite-horizon quantifier is checked on `t = 0..H`
//! plus the exact limits.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::{DeterministicPolicy, PolicySpace, TierMdp};
use crate::occupancy::{cumulative_tier_occupancy, reach_stats, tier_occupancy_stats, PolicyStats};
use crate::planning::{value_iteration, ViOptions};
use crate::reward::{sample_ordered_reward, StateReward, TierRewardVector};

/// Curves closer than this are treated as equal.
pub const CURVE_EPS: f64 = 1e-12;

/// Default cap on the number of enumerated policies.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    ADominatesB,
    BDominatesA,
    Incomparable,
    Equal,
}

/// Where the first strict difference shows up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Step(usize),
    Limit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominanceVerdict {
    pub relation: Relation,
    /// Earliest strict inequality in favour of the dominating side, or the
    /// earliest difference of any kind for incomparable pairs.
    pub witness: Option<Witness>,
}

/// Running comparison of curve pairs. `higher_is_better` orients each pair.
struct Tally {
    a_better: Option<usize>,
    b_better: Option<usize>,
    eps: f64,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            a_better: None,
            b_better: None,
            eps: CURVE_EPS,
        }
    }
}

impl Tally {
    #[inline]
    fn push(&mut self, idx: usize, a: f64, b: f64, higher_is_better: bool) {
        let (x, y) = if higher_is_better { (a, b) } else { (b, a) };
        if x > y + self.eps && self.a_better.is_none() {
            self.a_better = Some(idx);
        } else if y > x + self.eps && self.b_better.is_none() {
            self.b_better = Some(idx);
        }
    }

    fn settled(&self) -> bool {
        self.a_better.is_some() && self.b_better.is_some()
    }

    fn verdict(&self, limit_idx: usize) -> DominanceVerdict {
        let w = |i: usize| {
            if i == limit_idx {
                Witness::Limit
            } else {
                Witness::Step(i)
            }
        };
        match (self.a_better, self.b_better) {
            (None, None) => DominanceVerdict {
                relation: Relation::Equal,
                witness: None,
            },
            (Some(i), None) => DominanceVerdict {
                relation: Relation::ADominatesB,
                witness: Some(w(i)),
            },
            (None, Some(i)) => DominanceVerdict {
                relation: Relation::BDominatesA,
                witness: Some(w(i)),
            },
            (Some(i), Some(j)) => DominanceVerdict {
                relation: Relation::Incomparable,
                witness: Some(w(i.min(j))),
            },
        }
    }
}

/// Compares two policies' goal and obstacle curves.
pub fn dominates(a: &PolicyStats, b: &PolicyStats) -> Result<DominanceVerdict> {
    if a.horizon != b.horizon {
        return Err(Error::HorizonMismatch(a.horizon, b.horizon));
    }
    Ok(compare_reach(a, b))
}

fn compare_reach(a: &PolicyStats, b: &PolicyStats) -> DominanceVerdict {
    let h = a.horizon;
    let mut tally = Tally::default();
    for t in 0..=h {
        tally.push(t, a.cum_goal[t], b.cum_goal[t], true);
        tally.push(t, a.cum_obstacle[t], b.cum_obstacle[t], false);
        if tally.settled() {
            return tally.verdict(h + 1);
        }
    }
    tally.push(h + 1, a.limit_goal, b.limit_goal, true);
    tally.push(h + 1, a.limit_obstacle, b.limit_obstacle, false);
    tally.verdict(h + 1)
}

/// Compares the full per-tier first-visit system: lower is better on tier 1,
/// higher is better on tiers `2..=k`.
pub fn dominates_by_tiers(a: &PolicyStats, b: &PolicyStats) -> Result<DominanceVerdict> {
    if a.horizon != b.horizon {
        return Err(Error::HorizonMismatch(a.horizon, b.horizon));
    }
    if a.first_visit.is_empty() || a.first_visit.len() != b.first_visit.len() {
        return Err(Error::InvalidParameter(
            "per-tier first-visit curves are required".into(),
        ));
    }
    let h = a.horizon;
    let k = a.first_visit.len();
    let mut tally = Tally::default();
    for d in 0..k {
        let (mut ca, mut cb) = (0.0, 0.0);
        for t in 0..=h {
            ca += a.first_visit[d][t];
            cb += b.first_visit[d][t];
            tally.push(t, ca, cb, d > 0);
        }
        tally.push(h + 1, a.limit_tier[d], b.limit_tier[d], d > 0);
        if tally.settled() {
            break;
        }
    }
    Ok(tally.verdict(h + 1))
}

/// A group of enumerated policies with identical curves.
#[derive(Debug, Clone)]
pub struct FrontClass {
    pub stats: PolicyStats,
    pub policy_ids: Vec<u64>,
}

/// The non-dominated policies of an enumerable MDP.
#[derive(Debug, Clone)]
pub struct ParetoFront {
    pub space: PolicySpace,
    pub horizon: usize,
    pub classes: Vec<FrontClass>,
}

impl ParetoFront {
    /// Policy ids of every front member, ascending.
    pub fn member_ids(&self) -> Vec<u64> {
        let mut ids: Vec<u64> = self
            .classes
            .iter()
            .flat_map(|c| c.policy_ids.iter().copied())
            .collect();
        ids.sort_unstable();
        ids
    }

    pub fn contains(&self, id: u64) -> bool {
        self.classes.iter().any(|c| c.policy_ids.contains(&id))
    }

    /// Index of a front class that dominates `stats`, if any.
    pub fn dominator_of(&self, stats: &PolicyStats) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| compare_reach(&c.stats, stats).relation == Relation::ADominatesB)
    }

    pub fn is_pareto_optimal(&self, stats: &PolicyStats) -> bool {
        self.dominator_of(stats).is_none()
    }
}

/// Streaming archive of mutually non-dominated classes.
#[derive(Default)]
struct Archive {
    classes: Vec<FrontClass>,
}

impl Archive {
    fn offer(&mut self, id: u64, stats: PolicyStats) {
        let mut beaten = Vec::new();
        for (i, c) in self.classes.iter_mut().enumerate() {
            match compare_reach(&c.stats, &stats).relation {
                Relation::ADominatesB => return,
                Relation::Equal => {
                    c.policy_ids.push(id);
                    return;
                }
                Relation::BDominatesA => beaten.push(i),
                Relation::Incomparable => {}
            }
        }
        for i in beaten.into_iter().rev() {
            self.classes.swap_remove(i);
        }
        self.classes.push(FrontClass {
            stats,
            policy_ids: alloc::vec![id],
        });
    }

    #[cfg(feature = "parallel")]
    fn merge(mut self, other: Archive) -> Archive {
        for c in other.classes {
            let ids = c.policy_ids;
            let mut it = ids.into_iter();
            let first = it.next().unwrap();
            self.offer(first, c.stats);
            // the rest share the same curves; attach them wherever the first landed
            let rest: Vec<u64> = it.collect();
            if !rest.is_empty() {
                if let Some(cl) = self
                    .classes
                    .iter_mut()
                    .find(|cl| cl.policy_ids.contains(&first))
                {
                    cl.policy_ids.extend(rest);
                }
            }
        }
        self
    }
}

fn scan(mdp: &TierMdp, space: &PolicySpace, horizon: usize, ids: core::ops::Range<u64>) -> Archive {
    let mut archive = Archive::default();
    let mut actions = alloc::vec![0usize; mdp.n_states()];
    for id in ids {
        space.fill(id, &mut actions);
        let policy = DeterministicPolicy::new(actions.clone());
        archive.offer(id, reach_stats(mdp, &policy, horizon));
    }
    archive
}

/// Enumerates every deterministic policy and keeps the non-dominated ones.
pub fn pareto_front(mdp: &TierMdp, horizon: usize, budget: u64) -> Result<ParetoFront> {
    let space = PolicySpace::new(mdp, budget)?;
    let archive = scan_all(mdp, &space, horizon);
    let mut classes = archive.classes;
    for c in &mut classes {
        c.policy_ids.sort_unstable();
    }
    classes.sort_by_key(|c| c.policy_ids[0]);
    Ok(ParetoFront {
        space,
        horizon,
        classes,
    })
}

#[cfg(not(feature = "parallel"))]
fn scan_all(mdp: &TierMdp, space: &PolicySpace, horizon: usize) -> Archive {
    scan(mdp, space, horizon, 0..space.len())
}

#[cfg(feature = "parallel")]
fn scan_all(mdp: &TierMdp, space: &PolicySpace, horizon: usize) -> Archive {
    use rayon::prelude::*;
    let n = space.len();
    let chunk = 4096u64;
    let parts: Vec<Archive> = (0..n.div_ceil(chunk))
        .into_par_iter()
        .map(|i| scan(mdp, space, horizon, i * chunk..((i + 1) * chunk).min(n)))
        .collect();
    parts.into_iter().fold(Archive::default(), Archive::merge)
}

/// Is `policy` dominated by any enumerated policy? Brute force, no archive.
pub fn is_dominated_by_any(
    mdp: &TierMdp,
    policy: &DeterministicPolicy,
    horizon: usize,
    budget: u64,
) -> Result<bool> {
    let space = PolicySpace::new(mdp, budget)?;
    let me = reach_stats(mdp, policy, horizon);
    let mut actions = alloc::vec![0usize; mdp.n_states()];
    for id in 0..space.len() {
        space.fill(id, &mut actions);
        let other = reach_stats(mdp, &DeterministicPolicy::new(actions.clone()), horizon);
        if compare_reach(&other, &me).relation == Relation::ADominatesB {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Greedy policy of value iteration under a per-tier state reward.
pub fn induced_policy(mdp: &TierMdp, per_tier: &[f64]) -> Result<DeterministicPolicy> {
    let reward = StateReward::from_tiers(mdp, per_tier)?;
    Ok(value_iteration(mdp, &reward, ViOptions::default())?.policy)
}

/// Theorem check for 3 tiers against a precomputed front: the policy induced
/// by `(r_obs, r_back, r_goal)` must not be dominated.
pub fn verify_theorem1_with(front: &ParetoFront, mdp: &TierMdp, tiered: [f64; 3]) -> Result<bool> {
    if mdp.k() != 3 {
        return Err(Error::TierMismatch {
            reward: 3,
            mdp: mdp.k(),
        });
    }
    let policy = induced_policy(mdp, &tiered)?;
    Ok(front.is_pareto_optimal(&reach_stats(mdp, &policy, front.horizon)))
}

/// Enumerates the MDP's policies and runs [`verify_theorem1_with`].
pub fn verify_theorem1(
    mdp: &TierMdp,
    tiered: [f64; 3],
    horizon: usize,
    budget: u64,
) -> Result<bool> {
    let front = pareto_front(mdp, horizon, budget)?;
    verify_theorem1_with(&front, mdp, tiered)
}

/// The k-tier first-visit check: no enumerated policy may be at least as good
/// on every tier's cumulative first-visit curve and strictly better somewhere.
pub fn verify_theorem2(
    mdp: &TierMdp,
    tiered: &TierRewardVector,
    horizon: usize,
    budget: u64,
) -> Result<bool> {
    Ok(theorem2_counterexample(mdp, tiered, horizon, budget)?.is_none())
}

/// Like [`verify_theorem2`] but returns the offending policy id.
pub fn theorem2_counterexample(
    mdp: &TierMdp,
    tiered: &TierRewardVector,
    horizon: usize,
    budget: u64,
) -> Result<Option<u64>> {
    if tiered.k() != mdp.k() {
        return Err(Error::TierMismatch {
            reward: tiered.k(),
            mdp: mdp.k(),
        });
    }
    let space = PolicySpace::new(mdp, budget)?;
    let optimal = induced_policy(mdp, tiered.values())?;
    let star = tier_occupancy_stats(mdp, &optimal, horizon);
    let mut actions = alloc::vec![0usize; mdp.n_states()];
    for id in 0..space.len() {
        space.fill(id, &mut actions);
        let other = tier_occupancy_stats(mdp, &DeterministicPolicy::new(actions.clone()), horizon);
        if dominates_by_tiers(&other, &star)?.relation == Relation::ADominatesB {
            return Ok(Some(id));
        }
    }
    Ok(None)
}

/// Tolerance for cumulative occupancy comparisons.
pub const OCCUPANCY_EPS: f64 = 1e-9;

/// Compares cumulative tier occupancy (see
/// [`cumulative_tier_occupancy`](crate::occupancy::cumulative_tier_occupancy)):
/// lower is better on tier 1, higher on tiers `2..=k`, over the steps given.
pub fn dominates_by_occupancy(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<DominanceVerdict> {
    if a.len() != b.len() || a.iter().zip(b).any(|(x, y)| x.len() != y.len()) {
        return Err(Error::InvalidParameter(
            "occupancy tables differ in shape".into(),
        ));
    }
    let mut tally = Tally {
        eps: OCCUPANCY_EPS,
        ..Tally::default()
    };
    for (d, (ca, cb)) in a.iter().zip(b).enumerate() {
        for (t, (&x, &y)) in ca.iter().zip(cb).enumerate() {
            tally.push(t, x, y, d > 0);
        }
        if tally.settled() {
            break;
        }
    }
    Ok(tally.verdict(usize::MAX))
}

/// [`theorem2_counterexample`] with cumulative occupancy in place of
/// cumulative first visits.
pub fn theorem2_occupancy_counterexample(
    mdp: &TierMdp,
    tiered: &TierRewardVector,
    horizon: usize,
    budget: u64,
) -> Result<Option<u64>> {
    if tiered.k() != mdp.k() {
        return Err(Error::TierMismatch {
            reward: tiered.k(),
            mdp: mdp.k(),
        });
    }
    let space = PolicySpace::new(mdp, budget)?;
    let optimal = induced_policy(mdp, tiered.values())?;
    let star = cumulative_tier_occupancy(mdp, &optimal, horizon);
    let mut actions = alloc::vec![0usize; mdp.n_states()];
    for id in 0..space.len() {
        space.fill(id, &mut actions);
        let other =
            cumulative_tier_occupancy(mdp, &DeterministicPolicy::new(actions.clone()), horizon);
        if dominates_by_occupancy(&other, &star)?.relation == Relation::ADominatesB {
            return Ok(Some(id));
        }
    }
    Ok(None)
}

/// Outcome of [`dominated_fraction`].
#[derive(Debug, Clone, PartialEq)]
pub struct DominatedFraction {
    pub n_samples: usize,
    /// Induced policies dominated by some member of the exhaustive front.
    pub n_dominated: usize,
    pub fraction: f64,
    /// Induced policies dominated by another induced policy of the same sample.
    pub n_dominated_within_sample: usize,
    /// Every sampled `(r_lava, r_back, r_goal)` and whether it was dominated.
    pub samples: Vec<([f64; 3], bool)>,
}

/// Samples ordered 3-tier rewards on `[-1, 1)` and counts how many induce a
/// dominated policy.
pub fn dominated_fraction<R: Rng + ?Sized>(
    mdp: &TierMdp,
    front: &ParetoFront,
    n_samples: usize,
    rng: &mut R,
) -> Result<DominatedFraction> {
    dominated_fraction_in(mdp, front, n_samples, (-1.0, 1.0), rng)
}

/// [`dominated_fraction`] with the sampling interval `[lo, hi)` given.
pub fn dominated_fraction_in<R: Rng + ?Sized>(
    mdp: &TierMdp,
    front: &ParetoFront,
    n_samples: usize,
    (lo, hi): (f64, f64),
    rng: &mut R,
) -> Result<DominatedFraction> {
    if mdp.k() != 3 {
        return Err(Error::TierMismatch {
            reward: 3,
            mdp: mdp.k(),
        });
    }
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "empty sampling interval [{lo}, {hi})"
        )));
    }
    let mut cache: BTreeMap<DeterministicPolicy, (PolicyStats, bool)> = BTreeMap::new();
    let mut samples = Vec::with_capacity(n_samples);
    let mut induced = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let (lava, back, goal) = sample_ordered_reward(rng, lo, hi);
        let policy = induced_policy(mdp, &[lava, back, goal])?;
        let dominated = cache
            .entry(policy.clone())
            .or_insert_with(|| {
                let st = reach_stats(mdp, &policy, front.horizon);
                let d = !front.is_pareto_optimal(&st);
                (st, d)
            })
            .1;
        samples.push(([lava, back, goal], dominated));
        induced.push(policy);
    }
    let n_dominated = samples.iter().filter(|s| s.1).count();
    let distinct: Vec<&DeterministicPolicy> = cache.keys().collect();
    let within: BTreeMap<&DeterministicPolicy, bool> = distinct
        .iter()
        .map(|&p| {
            let me = &cache[p].0;
            let beaten = distinct
                .iter()
                .any(|&q| compare_reach(&cache[q].0, me).relation == Relation::ADominatesB);
            (p, beaten)
        })
        .collect();
    let n_within = induced.iter().filter(|p| within[p]).count();
    Ok(DominatedFraction {
        n_samples,
        n_dominated,
        fraction: if n_samples == 0 {
            0.0
        } else {
            n_dominated as f64 / n_samples as f64
        },
        n_dominated_within_sample: n_within,
        samples,
    })
}

/// Band drawn for one policy: `upper(t) = G_t`, `lower(t) = -1 + O_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaSeries {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

pub fn area_plot_data(stats: &PolicyStats) -> AreaSeries {
    AreaSeries {
        upper: stats.cum_goal.clone(),
        lower: stats.cum_obstacle.iter().map(|o| o - 1.0).collect(),
    }
}

impl AreaSeries {
    /// `self`'s band contains `other`'s at every step.
    pub fn encloses(&self, other: &AreaSeries) -> bool {
        self.upper
            .iter()
            .zip(&other.upper)
            .all(|(a, b)| *a >= b - CURVE_EPS)
            && self
                .lower
                .iter()
                .zip(&other.lower)
                .all(|(a, b)| *a <= b + CURVE_EPS)
    }
}
