//! Value iteration, exact policy evaluation and greedy extraction.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::Dense;
use crate::mdp::{DeterministicPolicy, TierMdp};
use crate::reward::RewardModel;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERS: usize = 100_000;

/// What an absorbing state is worth once entered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Terminal {
    /// The exit reward is collected once and the process ends.
    #[default]
    Once,
    /// The exit reward repeats forever: `exit(s) / (1 - gamma)`.
    Forever,
}

#[derive(Debug, Clone, Copy)]
pub struct ViOptions {
    pub tol: f64,
    pub max_iters: usize,
    pub terminal: Terminal,
}

impl Default for ViOptions {
    fn default() -> Self {
        ViOptions {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
            terminal: Terminal::Once,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ViSolution {
    pub values: Vec<f64>,
    pub policy: DeterministicPolicy,
    pub iterations: usize,
    /// Sup-norm Bellman residual of `values`.
    pub residual: f64,
}

pub(crate) fn terminal_value<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    s: usize,
    terminal: Terminal,
) -> f64 {
    match terminal {
        Terminal::Once => reward.exit(s),
        Terminal::Forever => reward.exit(s) / (1.0 - mdp.gamma()),
    }
}

/// `Q(s, a) = sum_{s'} T(s, a, s') [R(s, a, s') + gamma V(s')]` for a non-absorbing `s`.
#[inline]
pub fn q_value<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    values: &[f64],
    s: usize,
    a: usize,
) -> f64 {
    let g = mdp.gamma();
    mdp.row(s, a)
        .iter()
        .map(|&(n, p)| p * (reward.transition(s, a, n) + g * values[n]))
        .sum()
}

/// Index of the best entry; entries within `1e-9 * max(1, |best|)` of the
/// best count as ties and the lowest index wins.
pub fn argmax_lowest(qs: impl Iterator<Item = f64> + Clone) -> usize {
    let best = qs.clone().fold(f64::NEG_INFINITY, f64::max);
    let eps = 1e-9 * best.abs().max(1.0);
    qs.enumerate()
        .find(|&(_, q)| q >= best - eps)
        .map(|(a, _)| a)
        .unwrap_or(0)
}

/// Greedy policy with respect to `values`.
pub fn greedy_policy<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    values: &[f64],
) -> DeterministicPolicy {
    let actions = (0..mdp.n_states())
        .map(|s| {
            if mdp.is_absorbing(s) {
                0
            } else {
                argmax_lowest((0..mdp.n_actions()).map(|a| q_value(mdp, reward, values, s, a)))
            }
        })
        .collect();
    DeterministicPolicy::new(actions)
}

/// Jacobi value iteration until the sup-norm Bellman residual drops below `tol`.
pub fn value_iteration<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    opts: ViOptions,
) -> Result<ViSolution> {
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let n = mdp.n_states();
    let mut v: Vec<f64> = (0..n)
        .map(|s| {
            if mdp.is_absorbing(s) {
                terminal_value(mdp, reward, s, opts.terminal)
            } else {
                0.0
            }
        })
        .collect();
    let mut next = v.clone();
    let mut residual = f64::INFINITY;
    for iter in 0..opts.max_iters {
        residual = 0.0;
        for s in 0..n {
            if mdp.is_absorbing(s) {
                continue;
            }
            let best = (0..mdp.n_actions())
                .map(|a| q_value(mdp, reward, &v, s, a))
                .fold(f64::NEG_INFINITY, f64::max);
            residual = f64::max(residual, (best - v[s]).abs());
            next[s] = best;
        }
        if residual < opts.tol {
            let policy = greedy_policy(mdp, reward, &v);
            return Ok(ViSolution {
                values: v,
                policy,
                iterations: iter + 1,
                residual,
            });
        }
        core::mem::swap(&mut v, &mut next);
    }
    Err(Error::NotConverged {
        iters: opts.max_iters,
        residual,
    })
}

/// Sup-norm Bellman optimality residual of `values`.
pub fn bellman_residual<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    values: &[f64],
    terminal: Terminal,
) -> f64 {
    (0..mdp.n_states())
        .map(|s| {
            let target = if mdp.is_absorbing(s) {
                terminal_value(mdp, reward, s, terminal)
            } else {
                (0..mdp.n_actions())
                    .map(|a| q_value(mdp, reward, values, s, a))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            (target - values[s]).abs()
        })
        .fold(0.0, f64::max)
}

/// Exact value of a fixed policy by solving `(I - gamma P) V = r`.
pub fn evaluate_policy<R: RewardModel + ?Sized>(
    mdp: &TierMdp,
    reward: &R,
    policy: &DeterministicPolicy,
    terminal: Terminal,
) -> Vec<f64> {
    let n = mdp.n_states();
    let g = mdp.gamma();
    let mut m = Dense::identity(n);
    let mut b = vec![0.0; n];
    for s in 0..n {
        if mdp.is_absorbing(s) {
            b[s] = terminal_value(mdp, reward, s, terminal);
            continue;
        }
        let a = policy.action(s);
        for &(nx, p) in mdp.row(s, a) {
            m[(s, nx)] -= g * p;
            b[s] += p * reward.transition(s, a, nx);
        }
    }
    m.solve(b)
        .expect("I - gamma P is nonsingular for gamma < 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::tests::chain3;
    use crate::mdp::{TierMdp, TierMdpParts};
    use crate::reward::StateReward;

    fn single_absorbing(gamma: f64) -> TierMdp {
        TierMdp::from_parts(TierMdpParts {
            n_states: 1,
            n_actions: 1,
            rows: alloc::vec![alloc::vec![(0, 1.0)]],
            tier_of: alloc::vec![1],
            k: 1,
            gamma,
            absorbing: alloc::vec![true],
            start: 0,
            goal_obstacle: false,
        })
    }

    #[test]
    fn zero_reward_fixed_point() {
        let mdp = single_absorbing(0.5);
        let sol =
            value_iteration(&mdp, &StateReward(alloc::vec![0.0]), ViOptions::default()).unwrap();
        assert_eq!(sol.values, alloc::vec![0.0]);
    }

    #[test]
    fn absorbing_value_under_each_terminal_convention() {
        let mdp = single_absorbing(0.5);
        let r = StateReward(alloc::vec![3.0]);
        let forever = ViOptions {
            terminal: Terminal::Forever,
            ..Default::default()
        };
        assert_eq!(value_iteration(&mdp, &r, forever).unwrap().values[0], 6.0);
        assert_eq!(
            value_iteration(&mdp, &r, ViOptions::default())
                .unwrap()
                .values[0],
            3.0
        );
    }

    #[test]
    fn chain_values_match_return_expression() {
        // start -> mid -> goal: f_2 = r_back + gamma r_back + gamma^2 r_goal
        let mdp = chain3(0.9);
        let r = StateReward(alloc::vec![-1.0, -1.0, 5.0]);
        let sol = value_iteration(&mdp, &r, ViOptions::default()).unwrap();
        let expected = -1.0 - 0.9 + 0.81 * 5.0;
        assert!((sol.values[0] - expected).abs() < 1e-9);
        assert!(bellman_residual(&mdp, &r, &sol.values, Terminal::Once) < 1e-10);
    }

    #[test]
    fn non_convergence_is_reported() {
        let mdp = chain3(0.9);
        let r = StateReward(alloc::vec![-1.0, -1.0, 5.0]);
        let opts = ViOptions {
            max_iters: 1,
            tol: 1e-300,
            ..Default::default()
        };
        assert!(matches!(
            value_iteration(&mdp, &r, opts),
            Err(Error::NotConverged { iters: 1, .. })
        ));
    }

    #[test]
    fn ties_pick_lowest_index() {
        assert_eq!(argmax_lowest([1.0, 3.0, 3.0].into_iter()), 1);
        assert_eq!(argmax_lowest([3.0, 3.0 - 1e-12, 2.0].into_iter()), 0);
        assert_eq!(argmax_lowest([2.0, 3.0 - 1e-12, 3.0].into_iter()), 1);
    }
}
