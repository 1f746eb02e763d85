//! Tiered rewards, baseline rewards, and the reward models consumed by
//! planners and learners.
//!
//! Return accounting: a trajectory `s_0, s_1, .., s_T` that enters an
//! absorbing state at `T` collects `transition(s_t, a_t, s_{t+1})` for
//! `t < T` and then `exit(s_T)`, discounted by `gamma^t`, after which the
//! process ends. For a state reward both terms are `R(s_t)`, which gives
//! `f_t = gamma^t r_goal + sum_{j<t} gamma^j r_back` for a goal reached at `t`.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::TierMdp;

/// Rewards as seen by value iteration and the learners.
pub trait RewardModel {
    /// Reward for taking `action` in the non-absorbing `state` and landing in `next`.
    fn transition(&self, state: usize, action: usize, next: usize) -> f64;

    /// Reward collected on arrival in the absorbing `state`; the process ends there.
    fn exit(&self, state: usize) -> f64;
}

/// A reward defined on states only.
#[derive(Debug, Clone, PartialEq)]
pub struct StateReward(pub Vec<f64>);

impl StateReward {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// Per-state reward taking tier `d`'s value from `per_tier[d - 1]`.
    pub fn from_tiers(mdp: &TierMdp, per_tier: &[f64]) -> Result<Self> {
        if per_tier.len() != mdp.k() {
            return Err(Error::TierMismatch {
                reward: per_tier.len(),
                mdp: mdp.k(),
            });
        }
        Ok(StateReward(
            mdp.tiers().iter().map(|&t| per_tier[t - 1]).collect(),
        ))
    }
}

impl RewardModel for StateReward {
    #[inline]
    fn transition(&self, state: usize, _action: usize, _next: usize) -> f64 {
        self.0[state]
    }

    #[inline]
    fn exit(&self, state: usize) -> f64 {
        self.0[state]
    }
}

/// Potential-based shaping of a state reward:
/// `R(s, a, s') = base(s) + gamma * phi(s') - phi(s)`.
///
/// The potential after termination is zero, so the exit term on an absorbing
/// state is `base(s) - phi(s)` and the shaped return equals the base return
/// minus `phi(s_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapedReward {
    pub base: Vec<f64>,
    pub potential: Vec<f64>,
    pub gamma: f64,
}

impl ShapedReward {
    /// The shaping term `gamma * phi(s') - phi(s)`.
    pub fn shaping(&self, state: usize, next: usize) -> f64 {
        self.gamma * self.potential[next] - self.potential[state]
    }
}

impl RewardModel for ShapedReward {
    #[inline]
    fn transition(&self, state: usize, _action: usize, next: usize) -> f64 {
        self.base[state] + self.gamma * self.potential[next] - self.potential[state]
    }

    #[inline]
    fn exit(&self, state: usize) -> f64 {
        self.base[state] - self.potential[state]
    }
}

impl<R: RewardModel + ?Sized> RewardModel for &R {
    fn transition(&self, state: usize, action: usize, next: usize) -> f64 {
        (**self).transition(state, action, next)
    }
    fn exit(&self, state: usize) -> f64 {
        (**self).exit(state)
    }
}

/// Per-tier reward values `r_1..r_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TierRewardVector {
    values: Vec<f64>,
    gamma: f64,
    delta: Option<f64>,
}

/// Outcome of [`check_tiered_k`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainCheck {
    pub holds: bool,
    /// 1-based link index: link `i < k` is `r_i < r_{i+1} / (1 - gamma)`,
    /// link `k` is `r_k <= 0`.
    pub first_violation: Option<usize>,
}

fn horizon_factor(gamma: f64) -> f64 {
    1.0 / (1.0 - gamma)
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "gamma must lie in (0,1), got {gamma}"
        )))
    }
}

impl TierRewardVector {
    /// Wraps user-supplied values without checking the chain.
    pub fn new(values: Vec<f64>, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        if values.len() < 2 {
            return Err(Error::InvalidParameter(format!(
                "need k >= 2 values, got {}",
                values.len()
            )));
        }
        Ok(TierRewardVector {
            values,
            gamma,
            delta: None,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> Option<f64> {
        self.delta
    }

    pub fn check(&self) -> ChainCheck {
        check_tiered_k(&self.values, self.gamma)
    }

    /// `r_1 < r_2 < .. < r_k`.
    pub fn is_monotone(&self) -> bool {
        self.values.windows(2).all(|w| w[0] < w[1])
    }

    /// Expands the vector over the states of `mdp`.
    pub fn state_reward(&self, mdp: &TierMdp) -> Result<StateReward> {
        StateReward::from_tiers(mdp, &self.values)
    }
}

/// Builds `r_k = 0`, `r_i = r_{i+1} / (1 - gamma) - delta`.
///
/// When `delta` is below the float spacing of `r_{i+1} / (1 - gamma)` the
/// subtraction would be absorbed; the value is then stepped down one ulp so the
/// strict chain still holds in floating point.
pub fn build_tiered_reward(k: usize, gamma: f64, delta: f64) -> Result<TierRewardVector> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "k must be at least 2, got {k}"
        )));
    }
    check_gamma(gamma)?;
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "delta must be positive, got {delta}"
        )));
    }
    let c = horizon_factor(gamma);
    let mut values = alloc::vec![0.0; k];
    for i in (0..k - 1).rev() {
        let bound = c * values[i + 1];
        let mut r = bound - delta;
        if r >= bound {
            r = bound.next_down();
        }
        values[i] = r;
    }
    Ok(TierRewardVector {
        values,
        gamma,
        delta: Some(delta),
    })
}

/// Checks `r_1 < c r_2 < c^2 r_3 < .. < c^{k-1} r_k <= 0` with `c = 1/(1-gamma)`,
/// one adjacent link at a time, with exact float comparisons.
pub fn check_tiered_k(values: &[f64], gamma: f64) -> ChainCheck {
    let c = horizon_factor(gamma);
    for i in 0..values.len().saturating_sub(1) {
        if !(values[i] < c * values[i + 1]) {
            return ChainCheck {
                holds: false,
                first_violation: Some(i + 1),
            };
        }
    }
    match values.last() {
        Some(&last) if last <= 0.0 => ChainCheck {
            holds: true,
            first_violation: None,
        },
        _ => ChainCheck {
            holds: false,
            first_violation: Some(values.len()),
        },
    }
}

/// `r_obs < r_back / (1 - gamma) < r_goal`, strict, exact comparisons.
pub fn check_tiered_3(r_obs: f64, r_back: f64, r_goal: f64, gamma: f64) -> bool {
    check_tiered_3_links(r_obs, r_back, r_goal, gamma).holds
}

/// [`check_tiered_3`] reporting the first failing link: 1 for
/// `r_obs < r_back / (1 - gamma)`, 2 for `r_back / (1 - gamma) < r_goal`.
pub fn check_tiered_3_links(r_obs: f64, r_back: f64, r_goal: f64, gamma: f64) -> ChainCheck {
    let mid = horizon_factor(gamma) * r_back;
    let first_violation = if !(r_obs < mid) {
        Some(1)
    } else if !(mid < r_goal) {
        Some(2)
    } else {
        None
    };
    ChainCheck {
        holds: first_violation.is_none(),
        first_violation,
    }
}

/// Divides every value by `|r_1|`, mapping `r_1` to `-1` and `r_k = 0` to `0`.
pub fn scale_to_unit(v: &TierRewardVector) -> Result<TierRewardVector> {
    let r1 = v.values[0];
    if !(r1 < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "cannot scale: r_1 = {r1} is not negative"
        )));
    }
    let s = -r1;
    let values = v.values.iter().map(|&x| x / s).collect();
    Ok(TierRewardVector {
        values,
        gamma: v.gamma,
        delta: v.delta.map(|d| d / s),
    })
}

/// `+1` on goal-tier states, `-1` everywhere else.
pub fn action_penalty(mdp: &TierMdp) -> StateReward {
    StateReward(
        (0..mdp.n_states())
            .map(|s| if mdp.is_goal(s) { 1.0 } else { -1.0 })
            .collect(),
    )
}

/// Action penalty shaped with the tiered reward as potential.
pub fn tier_based_shaping(mdp: &TierMdp, tiered: &TierRewardVector) -> Result<ShapedReward> {
    if tiered.k() != mdp.k() {
        return Err(Error::TierMismatch {
            reward: tiered.k(),
            mdp: mdp.k(),
        });
    }
    Ok(ShapedReward {
        base: action_penalty(mdp).0,
        potential: tiered.state_reward(mdp)?.0,
        gamma: mdp.gamma(),
    })
}

/// Three independent uniforms on `[lo, hi)`, sorted; ties are redrawn.
/// Returns `(r_lava, r_back, r_goal)`.
pub fn sample_ordered_reward<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> (f64, f64, f64) {
    loop {
        let mut v = [
            rng.gen_range(lo..hi),
            rng.gen_range(lo..hi),
            rng.gen_range(lo..hi),
        ];
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if v[0] < v[1] && v[1] < v[2] {
            return (v[0], v[1], v[2]);
        }
    }
}

/// Samples a triple passing [`check_tiered_3`] for `gamma`.
///
/// `r_back` is uniform on `[-1, 1)`; the obstacle and goal values sit a
/// uniform gap in `(0, 1]`, scaled by `|r_back / (1-gamma)| + 1`, below and
/// above `r_back / (1 - gamma)`.
pub fn sample_tiered_3<R: Rng + ?Sized>(rng: &mut R, gamma: f64) -> (f64, f64, f64) {
    loop {
        let r_back: f64 = rng.gen_range(-1.0..1.0);
        let mid = horizon_factor(gamma) * r_back;
        let scale = mid.abs() + 1.0;
        let lo_gap = scale * (1.0 - rng.gen::<f64>());
        let hi_gap = scale * (1.0 - rng.gen::<f64>());
        let (r_obs, r_goal) = (mid - lo_gap, mid + hi_gap);
        if check_tiered_3(r_obs, r_back, r_goal, gamma) {
            return (r_obs, r_back, r_goal);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn five_tier_tables() {
        assert_eq!(
            build_tiered_reward(5, 0.5, 5.0).unwrap().values(),
            &[-75.0, -35.0, -15.0, -5.0, 0.0]
        );
        let v = build_tiered_reward(5, 0.99, 5.0).unwrap();
        let expected = [-5050505.0, -50505.0, -505.0, -5.0, 0.0];
        for (a, b) in v.values().iter().zip(expected) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn nine_tier_table() {
        let v = build_tiered_reward(9, 0.5, 5.0).unwrap();
        assert_eq!(
            v.values(),
            &[-1275.0, -635.0, -315.0, -155.0, -75.0, -35.0, -15.0, -5.0, 0.0]
        );
    }

    #[test]
    fn bad_parameters() {
        assert!(build_tiered_reward(1, 0.9, 0.1).is_err());
        assert!(build_tiered_reward(3, 1.0, 0.1).is_err());
        assert!(build_tiered_reward(3, 0.9, 0.0).is_err());
    }

    #[test]
    fn chain_checks() {
        assert!(check_tiered_k(&[-75.0, -35.0, -15.0, -5.0, 0.0], 0.5).holds);
        let b = check_tiered_k(&[-1.0, -0.9, 0.0], 0.9);
        assert_eq!(
            b,
            ChainCheck {
                holds: false,
                first_violation: Some(1)
            }
        );
        let pos = check_tiered_k(&[-1.0, 0.1], 0.5);
        assert_eq!(pos.first_violation, Some(2));
    }

    #[test]
    fn three_tier_table_one() {
        assert!(check_tiered_3(-1.0, 0.0, 0.5, 0.9));
        // R sits exactly on the boundary: -1 < 10 * -0.1 is not strict.
        assert!(!check_tiered_3(-1.0, -0.1, 1.0, 0.9));
        assert!(!check_tiered_3(-1.0, -0.9, 0.0, 0.9));
        assert_eq!(
            check_tiered_3_links(-1.0, -0.9, 0.0, 0.9).first_violation,
            Some(1)
        );
        assert_eq!(
            check_tiered_3_links(-20.0, -0.1, -2.0, 0.9).first_violation,
            Some(2)
        );
    }

    #[test]
    fn scaling() {
        let v = TierRewardVector::new(alloc::vec![-75.0, -35.0, -15.0, -5.0, 0.0], 0.5).unwrap();
        let s = scale_to_unit(&v).unwrap();
        let expected = [-1.0, -0.4667, -0.2, -0.0667, 0.0];
        for (a, b) in s.values().iter().zip(expected) {
            assert!((a - b).abs() < 1e-4);
        }
        let unit = TierRewardVector::new(alloc::vec![-1.0, 0.0], 0.9).unwrap();
        assert_eq!(scale_to_unit(&unit).unwrap().values(), &[-1.0, 0.0]);
        let nine = scale_to_unit(&build_tiered_reward(9, 0.5, 5.0).unwrap()).unwrap();
        assert!((nine.values()[4] + 0.0588).abs() < 1e-4);
        let zero = TierRewardVector::new(alloc::vec![0.0, 0.0], 0.9).unwrap();
        assert!(scale_to_unit(&zero).is_err());
    }

    #[test]
    fn shaping_same_tier_is_positive() {
        let r = ShapedReward {
            base: alloc::vec![0.0; 2],
            potential: alloc::vec![-3.0, -3.0],
            gamma: 0.9,
        };
        assert!(r.shaping(0, 1) > 0.0);
        assert!((r.shaping(0, 1) - (0.9 - 1.0) * -3.0).abs() < 1e-15);
    }

    #[test]
    fn zero_potential_reduces_to_base() {
        let r = ShapedReward {
            base: alloc::vec![-1.0, 1.0],
            potential: alloc::vec![0.0; 2],
            gamma: 0.9,
        };
        let base = StateReward(alloc::vec![-1.0, 1.0]);
        for s in 0..2 {
            assert_eq!(r.transition(s, 0, 1 - s), base.transition(s, 0, 1 - s));
            assert_eq!(r.exit(s), base.exit(s));
        }
    }

    #[test]
    fn ordered_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut seen = Vec::new();
        for _ in 0..1000 {
            let (a, b, c) = sample_ordered_reward(&mut rng, -1.0, 1.0);
            assert!(a < b && b < c);
            seen.push([a, b, c]);
        }
        for i in 0..seen.len() {
            for j in i + 1..seen.len() {
                let d = (0..3)
                    .map(|x| (seen[i][x] - seen[j][x]).abs())
                    .fold(0.0, f64::max);
                assert!(d > 1e-12);
            }
        }
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            sample_ordered_reward(&mut r1, -1.0, 1.0),
            sample_ordered_reward(&mut r2, -1.0, 1.0)
        );
    }

    #[test]
    fn tiered_3_samples_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let (o, b, g) = sample_tiered_3(&mut rng, 0.9);
            assert!(check_tiered_3(o, b, g, 0.9));
        }
    }
}
