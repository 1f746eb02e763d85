//! Tier labelling of grid states.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;

use super::grid::{Cell, GridWorld};
use crate::error::{Error, Result};
use crate::mdp::{Tier, TierMdp};

#[derive(Debug, Clone, PartialEq)]
pub enum TierRule {
    /// Bands of L1 distance to the nearest goal cell.
    L1ToGoal,
    /// Bands of `goal_weight * d(goal) + start_weight * d(start)`.
    WeightedL1 { goal_weight: u32, start_weight: u32 },
    /// Tier `i + 1` holds states with `i` flags; the goal is tier `k`.
    FlagsCollected,
    /// One label per state, in state-index order.
    Explicit(Vec<Tier>),
}

impl TierRule {
    pub fn weighted_l1() -> TierRule {
        TierRule::WeightedL1 {
            goal_weight: 2,
            start_weight: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TierAssignment {
    pub rule: TierRule,
    pub k: usize,
}

fn l1(a: (usize, usize), b: (usize, usize)) -> u64 {
    (a.0.abs_diff(b.0) + a.1.abs_diff(b.1)) as u64
}

impl GridWorld {
    fn cells_of(&self, want: Cell) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.cells[r][c] == want {
                    out.push((r, c));
                }
            }
        }
        out
    }

    fn is_goal_state(&self, s: usize) -> bool {
        let st = self.states[s];
        self.cells[st.row][st.col] == Cell::Goal && st.flags == self.n_flags
    }

    fn is_lava_state(&self, s: usize) -> bool {
        let st = self.states[s];
        self.cells[st.row][st.col] == Cell::Lava
    }

    /// Distance score used for banding; smaller is better.
    fn distance(&self, s: usize, goal_weight: u64, start_weight: u64) -> u64 {
        let st = self.states[s];
        let here = (st.row, st.col);
        let dg = self
            .cells_of(Cell::Goal)
            .into_iter()
            .map(|g| l1(here, g))
            .min()
            .unwrap_or(0);
        let start = self.states[self.start];
        goal_weight * dg + start_weight * l1(here, (start.row, start.col))
    }

    /// Labels every state and returns the resulting tier MDP.
    pub fn assign_tiers(&self, assignment: &TierAssignment) -> Result<TierMdp> {
        let k = assignment.k;
        if k < 2 {
            return Err(Error::InvalidParameter(format!(
                "need at least 2 tiers, got {k}"
            )));
        }
        let n = self.n_states();
        let has_lava = (0..n).any(|s| self.is_lava_state(s));
        let (weights, flags) = match &assignment.rule {
            TierRule::L1ToGoal => ((1, 0), false),
            TierRule::WeightedL1 {
                goal_weight,
                start_weight,
            } => ((*goal_weight as u64, *start_weight as u64), false),
            TierRule::FlagsCollected => ((0, 0), true),
            TierRule::Explicit(labels) => {
                if labels.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "{} labels for {n} states",
                        labels.len()
                    )));
                }
                let goal_obstacle = has_lava && k >= 3;
                return self.to_mdp(labels.clone(), k, goal_obstacle);
            }
        };
        if flags {
            if self.n_flags == 0 {
                return Err(Error::InvalidParameter(
                    "flags_collected needs a map with flags".to_string(),
                ));
            }
            if has_lava {
                return Err(Error::InvalidParameter(
                    "flags_collected does not support lava".to_string(),
                ));
            }
            if k != self.n_flags + 2 {
                return Err(Error::TooManyTiers {
                    requested: k,
                    available: self.n_flags + 2,
                });
            }
            let tier_of = (0..n)
                .map(|s| {
                    if self.is_goal_state(s) {
                        k
                    } else {
                        self.states[s].flags + 1
                    }
                })
                .collect();
            return self.to_mdp(tier_of, k, false);
        }

        let obstacle_tier = has_lava && k >= 3;
        let base = if obstacle_tier { 2 } else { 1 };
        let n_bands = k - base;
        let background: Vec<usize> = (0..n)
            .filter(|&s| !self.is_goal_state(s) && !(obstacle_tier && self.is_lava_state(s)))
            .collect();
        let mut distinct: Vec<u64> = background
            .iter()
            .map(|&s| self.distance(s, weights.0, weights.1))
            .collect();
        distinct.sort_unstable();
        distinct.dedup();
        if n_bands > distinct.len() {
            return Err(Error::TooManyTiers {
                requested: k,
                available: distinct.len() + base,
            });
        }
        let m = distinct.len();
        let mut tier_of = alloc::vec![0; n];
        for s in 0..n {
            tier_of[s] = if self.is_goal_state(s) {
                k
            } else if obstacle_tier && self.is_lava_state(s) {
                1
            } else {
                let d = self.distance(s, weights.0, weights.1);
                // rank 0 is the farthest value
                let rank = m - 1 - distinct.binary_search(&d).unwrap();
                base + rank * n_bands / m
            };
        }
        self.to_mdp(tier_of, k, obstacle_tier)
    }

    /// Tier labels laid out on the grid; walls print as `#`.
    pub fn tier_map(&self, mdp: &TierMdp) -> Vec<Vec<Option<Tier>>> {
        let mut out = alloc::vec![alloc::vec![None; self.cols]; self.rows];
        for (s, st) in self.states.iter().enumerate() {
            // with flags, show the zero-flag layer, falling back to any reached layer
            let slot = &mut out[st.row][st.col];
            if slot.is_none() || st.flags == 0 {
                *slot = Some(mdp.tier(s));
            }
        }
        out
    }
}
