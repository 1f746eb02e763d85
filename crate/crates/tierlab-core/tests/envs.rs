use tierlab_core::envs::{
    make_preset, make_preset_k, Cell, GridWorld, Preset, TierAssignment, TierRule, PRESET_NAMES,
};
use tierlab_core::planning::{value_iteration, ViOptions};
use tierlab_core::reward::{action_penalty, build_tiered_reward, tier_based_shaping};

fn l1_to_goal(w: &GridWorld, s: usize) -> usize {
    let st = w.states[s];
    let mut best = usize::MAX;
    for r in 0..w.rows {
        for c in 0..w.cols {
            if w.cell(r, c) == Cell::Goal {
                best = best.min(st.row.abs_diff(r) + st.col.abs_diff(c));
            }
        }
    }
    best
}

#[test]
fn every_preset_validates_and_absorbs_only_goal_or_lava() {
    for name in PRESET_NAMES {
        let p = Preset::from_name(name).unwrap();
        let w = p.world().unwrap();
        let mdp = make_preset(name).unwrap();
        assert!(mdp.validate().is_empty(), "{name}");
        for s in 0..mdp.n_states() {
            let st = w.states[s];
            let cell = w.cell(st.row, st.col);
            let expect = cell == Cell::Lava || (cell == Cell::Goal && st.flags == w.n_flags);
            assert_eq!(mdp.is_absorbing(s), expect, "{name} state {s}");
            assert_ne!(cell, Cell::Wall);
        }
    }
}

#[test]
fn grid_bands_are_monotone_in_distance() {
    let w = Preset::Grid.world().unwrap();
    for k in 2..=9 {
        let mdp = w
            .assign_tiers(&TierAssignment {
                rule: TierRule::L1ToGoal,
                k,
            })
            .unwrap();
        assert!(mdp.validate().is_empty());
        for a in 0..mdp.n_states() {
            for b in 0..mdp.n_states() {
                if l1_to_goal(&w, a) < l1_to_goal(&w, b) {
                    assert!(mdp.tier(a) >= mdp.tier(b), "k={k}: {a} vs {b}");
                }
            }
        }
    }
    // k = 9: eight background bands over the 16 distances 1..=16, two per band
    let mdp = w
        .assign_tiers(&TierAssignment {
            rule: TierRule::L1ToGoal,
            k: 9,
        })
        .unwrap();
    for s in 0..mdp.n_states() {
        let d = l1_to_goal(&w, s);
        let expected = if d == 0 { 9 } else { 1 + (16 - d) / 2 };
        assert_eq!(mdp.tier(s), expected, "distance {d}");
    }
}

#[test]
fn two_tiers_leave_the_goal_alone_on_top() {
    for name in [
        "grid",
        "chain",
        "russell_norvig",
        "frozen_lake",
        "wall_grid",
    ] {
        let mdp = make_preset_k(name, 2).unwrap();
        for s in 0..mdp.n_states() {
            assert_eq!(
                mdp.tier(s) == 2,
                mdp.is_goal(s) && mdp.is_absorbing(s),
                "{name}"
            );
        }
    }
}

#[test]
fn too_many_tiers_is_an_error() {
    assert!(make_preset_k("russell_norvig", 12).is_err());
}

#[test]
fn flag_grid_product_states() {
    let w = Preset::FlagGrid.world().unwrap();
    assert_eq!(w.n_flags, 4);
    let cells = w.rows * w.cols;
    // every state is a (cell, flags) pair and no pair repeats
    let mut seen = std::collections::BTreeSet::new();
    for st in &w.states {
        assert!(st.flags <= 4);
        assert!(seen.insert((st.row, st.col, st.flags)));
    }
    assert!(w.n_states() <= cells * 5);
    // a flag cell is only ever occupied holding at least its own count
    for st in &w.states {
        if let Cell::Flag(n) = w.cell(st.row, st.col) {
            assert!(st.flags >= n || st.flags + 1 < n);
        }
    }
    let mdp = make_preset("flag_grid").unwrap();
    for s in 0..mdp.n_states() {
        let t = mdp.tier(s);
        if mdp.is_goal(s) {
            assert_eq!(t, 6);
        } else {
            assert_eq!(t, w.states[s].flags + 1);
        }
        for a in 0..mdp.n_actions() {
            for &(n, _) in mdp.row(s, a) {
                assert!(w.states[n].flags >= w.states[s].flags, "flags lost");
                assert!(mdp.tier(n) >= t, "tier dropped");
                if w.states[n].flags > w.states[s].flags {
                    assert!(mdp.tier(n) > t);
                }
            }
        }
    }
}

#[test]
fn weighted_rule_prefers_progress() {
    let w = Preset::FrozenLake.world().unwrap();
    let mdp = w
        .assign_tiers(&TierAssignment {
            rule: TierRule::weighted_l1(),
            k: 5,
        })
        .unwrap();
    assert!(mdp.is_goal_obstacle());
    let start = mdp.start();
    assert_eq!(mdp.tier(start), 2);
    let lava: Vec<usize> = (0..mdp.n_states()).filter(|&s| mdp.tier(s) == 1).collect();
    assert!(!lava.is_empty());
    assert!(lava.iter().all(|&s| mdp.is_absorbing(s)));
}

#[test]
fn shaping_keeps_greedy_policies_on_presets() {
    for name in PRESET_NAMES {
        let p = Preset::from_name(name).unwrap();
        let ks: Vec<usize> = if p == Preset::FlagGrid {
            vec![6]
        } else {
            vec![2, 3]
        };
        for k in ks {
            let mdp = make_preset_k(name, k).unwrap();
            let base = action_penalty(&mdp);
            let shaped =
                tier_based_shaping(&mdp, &build_tiered_reward(k, mdp.gamma(), 0.1).unwrap())
                    .unwrap();
            let a = value_iteration(&mdp, &base, ViOptions::default())
                .unwrap()
                .policy;
            let b = value_iteration(&mdp, &shaped, ViOptions::default())
                .unwrap()
                .policy;
            assert_eq!(a, b, "{name} k={k}");
        }
    }
}

#[test]
fn user_map_replaces_builtin() {
    let spec = Preset::Grid.spec_with_map("S..\n.#.\n..G\n".into());
    let w = GridWorld::parse(&spec).unwrap();
    assert_eq!(w.n_states(), 8);
}
