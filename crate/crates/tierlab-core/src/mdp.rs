//! Finite tier MDPs and deterministic policies.
//!
//! Transitions are stored as sparse rows: for each `(state, action)` a list of
//! `(next_state, probability)` pairs with distinct next states.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Row-sum tolerance used by [`TierMdp::validate`].
pub const ROW_SUM_TOL: f64 = 1e-9;

/// A tier index, 1-based: tier 1 is the worst, tier `k` the best.
pub type Tier = usize;

/// A finite MDP whose states are partitioned into `k` ordered tiers.
#[derive(Debug, Clone, PartialEq)]
pub struct TierMdp {
    n_states: usize,
    n_actions: usize,
    rows: Vec<Vec<(usize, f64)>>,
    tier_of: Vec<Tier>,
    k: usize,
    gamma: f64,
    absorbing: Vec<bool>,
    start: usize,
    goal_obstacle: bool,
}

/// Raw parts of a [`TierMdp`]; nothing is checked at construction.
#[derive(Debug, Clone)]
pub struct TierMdpParts {
    pub n_states: usize,
    pub n_actions: usize,
    /// Sparse rows indexed `state * n_actions + action`.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub tier_of: Vec<Tier>,
    pub k: usize,
    pub gamma: f64,
    pub absorbing: Vec<bool>,
    pub start: usize,
    /// When set, every tier-1 and tier-k state must be absorbing.
    pub goal_obstacle: bool,
}

/// One problem found by [`TierMdp::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ShapeMismatch(String),
    RowSum {
        state: usize,
        action: usize,
        sum: f64,
    },
    ProbabilityOutOfRange {
        state: usize,
        action: usize,
        next: usize,
        p: f64,
    },
    NextStateOutOfRange {
        state: usize,
        action: usize,
        next: usize,
    },
    TierOutOfRange {
        state: usize,
        tier: Tier,
    },
    EmptyTier {
        tier: Tier,
    },
    TooFewTiers {
        k: usize,
    },
    GammaOutOfRange {
        gamma: f64,
    },
    StartOutOfRange {
        start: usize,
    },
    NotAbsorbing {
        state: usize,
    },
    TierNotAbsorbing {
        state: usize,
        tier: Tier,
    },
}

impl core::fmt::Display for Violation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Violation::ShapeMismatch(m) => write!(f, "shape mismatch: {m}"),
            Violation::RowSum { state, action, sum } => {
                write!(
                    f,
                    "transition row (state {state}, action {action}) sums to {sum}"
                )
            }
            Violation::ProbabilityOutOfRange {
                state,
                action,
                next,
                p,
            } => write!(
                f,
                "probability {p} out of [0,1] at (state {state}, action {action}, next {next})"
            ),
            Violation::NextStateOutOfRange {
                state,
                action,
                next,
            } => {
                write!(
                    f,
                    "next state {next} out of range at (state {state}, action {action})"
                )
            }
            Violation::TierOutOfRange { state, tier } => {
                write!(f, "tier index out of range: state {state} has tier {tier}")
            }
            Violation::EmptyTier { tier } => write!(f, "tier {tier} has no states"),
            Violation::TooFewTiers { k } => write!(f, "k = {k}, need at least 2 tiers"),
            Violation::GammaOutOfRange { gamma } => write!(f, "gamma {gamma} not in (0,1)"),
            Violation::StartOutOfRange { start } => write!(f, "start state {start} out of range"),
            Violation::NotAbsorbing { state } => {
                write!(
                    f,
                    "state {state} is marked absorbing but does not self-loop"
                )
            }
            Violation::TierNotAbsorbing { state, tier } => {
                write!(f, "state {state} in tier {tier} must be absorbing")
            }
        }
    }
}

impl TierMdp {
    /// Builds an MDP without checking it; see [`TierMdp::validate`].
    pub fn from_parts(parts: TierMdpParts) -> Self {
        TierMdp {
            n_states: parts.n_states,
            n_actions: parts.n_actions,
            rows: parts.rows,
            tier_of: parts.tier_of,
            k: parts.k,
            gamma: parts.gamma,
            absorbing: parts.absorbing,
            start: parts.start,
            goal_obstacle: parts.goal_obstacle,
        }
    }

    /// Builds an MDP and rejects it if [`TierMdp::validate`] reports anything.
    pub fn new(parts: TierMdpParts) -> Result<Self> {
        let mdp = Self::from_parts(parts);
        let report = mdp.validate();
        if let Some(v) = report.first() {
            return Err(Error::InvalidMdp(format!(
                "{v} ({} violations)",
                report.len()
            )));
        }
        Ok(mdp)
    }

    pub fn into_parts(self) -> TierMdpParts {
        TierMdpParts {
            n_states: self.n_states,
            n_actions: self.n_actions,
            rows: self.rows,
            tier_of: self.tier_of,
            k: self.k,
            gamma: self.gamma,
            absorbing: self.absorbing,
            start: self.start,
            goal_obstacle: self.goal_obstacle,
        }
    }

    /// Checks every structural invariant and lists what is wrong.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n_states;
        if self.rows.len() != n * self.n_actions {
            out.push(Violation::ShapeMismatch(format!(
                "{} rows for {} states x {} actions",
                self.rows.len(),
                n,
                self.n_actions
            )));
            return out;
        }
        if self.tier_of.len() != n || self.absorbing.len() != n {
            out.push(Violation::ShapeMismatch(format!(
                "tier_of has {} entries, absorbing has {}, expected {n}",
                self.tier_of.len(),
                self.absorbing.len()
            )));
            return out;
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            out.push(Violation::GammaOutOfRange { gamma: self.gamma });
        }
        if self.k < 2 {
            out.push(Violation::TooFewTiers { k: self.k });
        }
        if self.start >= n {
            out.push(Violation::StartOutOfRange { start: self.start });
        }
        for s in 0..n {
            for a in 0..self.n_actions {
                let mut sum = 0.0;
                for &(next, p) in &self.rows[s * self.n_actions + a] {
                    if next >= n {
                        out.push(Violation::NextStateOutOfRange {
                            state: s,
                            action: a,
                            next,
                        });
                    }
                    if !(0.0..=1.0).contains(&p) {
                        out.push(Violation::ProbabilityOutOfRange {
                            state: s,
                            action: a,
                            next,
                            p,
                        });
                    }
                    sum += p;
                }
                if (sum - 1.0).abs() > ROW_SUM_TOL {
                    out.push(Violation::RowSum {
                        state: s,
                        action: a,
                        sum,
                    });
                }
            }
        }
        let mut seen = vec![false; self.k + 1];
        for (s, &t) in self.tier_of.iter().enumerate() {
            if t == 0 || t > self.k {
                out.push(Violation::TierOutOfRange { state: s, tier: t });
            } else {
                seen[t] = true;
            }
        }
        for (t, &hit) in seen.iter().enumerate().skip(1) {
            if !hit {
                out.push(Violation::EmptyTier { tier: t });
            }
        }
        for s in 0..n {
            if self.absorbing[s] && !self.self_loops(s) {
                out.push(Violation::NotAbsorbing { state: s });
            }
            let t = self.tier_of[s];
            if self.goal_obstacle && (t == 1 || t == self.k) && !self.absorbing[s] {
                out.push(Violation::TierNotAbsorbing { state: s, tier: t });
            }
        }
        out
    }

    fn self_loops(&self, s: usize) -> bool {
        (0..self.n_actions).all(|a| {
            let p: f64 = self
                .row(s, a)
                .iter()
                .filter(|&&(n, _)| n == s)
                .map(|&(_, p)| p)
                .sum();
            (p - 1.0).abs() <= ROW_SUM_TOL
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn is_goal_obstacle(&self) -> bool {
        self.goal_obstacle
    }

    /// Sparse successor list of `(state, action)`.
    #[inline]
    pub fn row(&self, s: usize, a: usize) -> &[(usize, f64)] {
        &self.rows[s * self.n_actions + a]
    }

    /// Dense accessor `T(s, a, s')`.
    pub fn prob(&self, s: usize, a: usize, next: usize) -> f64 {
        self.row(s, a)
            .iter()
            .filter(|&&(n, _)| n == next)
            .map(|&(_, p)| p)
            .sum()
    }

    #[inline]
    pub fn tier(&self, s: usize) -> Tier {
        self.tier_of[s]
    }

    pub fn tiers(&self) -> &[Tier] {
        &self.tier_of
    }

    #[inline]
    pub fn is_absorbing(&self, s: usize) -> bool {
        self.absorbing[s]
    }

    pub fn absorbing(&self) -> &[bool] {
        &self.absorbing
    }

    pub fn is_goal(&self, s: usize) -> bool {
        self.tier_of[s] == self.k
    }

    /// Non-absorbing states in ascending order; these are the decision states.
    pub fn decision_states(&self) -> Vec<usize> {
        (0..self.n_states).filter(|&s| !self.absorbing[s]).collect()
    }

    /// Returns a copy with a new discount factor.
    pub fn with_gamma(&self, gamma: f64) -> Self {
        let mut m = self.clone();
        m.gamma = gamma;
        m
    }

    /// Returns a copy with new tier labels.
    pub fn with_tiers(&self, tier_of: Vec<Tier>, k: usize, goal_obstacle: bool) -> Self {
        let mut m = self.clone();
        m.tier_of = tier_of;
        m.k = k;
        m.goal_obstacle = goal_obstacle;
        m
    }

    /// Transition matrix of the Markov chain induced by a policy, as sparse rows.
    pub fn chain_under(&self, policy: &DeterministicPolicy) -> Vec<&[(usize, f64)]> {
        (0..self.n_states)
            .map(|s| self.row(s, policy.action(s)))
            .collect()
    }
}

/// A state-to-action table. Absorbing states carry action 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DeterministicPolicy {
    actions: Vec<usize>,
}

impl DeterministicPolicy {
    pub fn new(actions: Vec<usize>) -> Self {
        DeterministicPolicy { actions }
    }

    /// Same action everywhere except absorbing states.
    pub fn constant(mdp: &TierMdp, action: usize) -> Self {
        let actions = (0..mdp.n_states())
            .map(|s| if mdp.is_absorbing(s) { 0 } else { action })
            .collect();
        DeterministicPolicy { actions }
    }

    #[inline]
    pub fn action(&self, s: usize) -> usize {
        self.actions[s]
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    /// Checks totality and action ranges against `mdp`.
    pub fn check(&self, mdp: &TierMdp) -> Result<()> {
        if self.actions.len() != mdp.n_states() {
            return Err(Error::InvalidParameter(format!(
                "policy covers {} states, MDP has {}",
                self.actions.len(),
                mdp.n_states()
            )));
        }
        if let Some((s, &a)) = self
            .actions
            .iter()
            .enumerate()
            .find(|(_, &a)| a >= mdp.n_actions())
        {
            return Err(Error::InvalidParameter(format!(
                "state {s}: action {a} out of range"
            )));
        }
        Ok(())
    }
}

/// Mixed-radix enumeration of all deterministic policies of an MDP.
///
/// Policy `id` assigns `(id / A^i) % A` to the `i`-th decision state.
#[derive(Debug, Clone)]
pub struct PolicySpace {
    decision: Vec<usize>,
    n_states: usize,
    n_actions: usize,
    count: u64,
}

impl PolicySpace {
    pub fn new(mdp: &TierMdp, budget: u64) -> Result<Self> {
        let decision = mdp.decision_states();
        let a = mdp.n_actions() as u128;
        let mut needed: u128 = 1;
        for _ in &decision {
            needed = needed.saturating_mul(a);
        }
        if needed > budget as u128 {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(PolicySpace {
            decision,
            n_states: mdp.n_states(),
            n_actions: mdp.n_actions(),
            count: needed as u64,
        })
    }

    pub fn len(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn policy(&self, id: u64) -> DeterministicPolicy {
        let mut actions = vec![0; self.n_states];
        self.fill(id, &mut actions);
        DeterministicPolicy { actions }
    }

    /// Writes policy `id` into an existing action buffer.
    pub fn fill(&self, mut id: u64, actions: &mut [usize]) {
        let a = self.n_actions as u64;
        for &s in &self.decision {
            actions[s] = (id % a) as usize;
            id /= a;
        }
    }

    /// Inverse of [`PolicySpace::policy`].
    pub fn id_of(&self, policy: &DeterministicPolicy) -> u64 {
        let a = self.n_actions as u64;
        self.decision
            .iter()
            .rev()
            .fold(0u64, |acc, &s| acc * a + policy.action(s) as u64)
    }
}
