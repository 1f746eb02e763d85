use std::io::Write;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use tierlab_core::occupancy::DEFAULT_HORIZON;
use tierlab_core::pareto::{
    area_plot_data, dominated_fraction_in, theorem2_counterexample,
    theorem2_occupancy_counterexample, verify_theorem1_with,
};
use tierlab_core::reward::{build_tiered_reward, sample_tiered_3};
use tierlab_core::{pareto_front, reach_stats, DeterministicPolicy, ParetoFront, TierMdp};

use crate::cli::{Global, ParetoArgs};
use crate::csvio::{self, FractionRow, SeriesRow};
use crate::maps::{load_world, LoadedWorld};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontRow {
    pub class: usize,
    pub policy_id: u64,
    pub limit_goal: f64,
    pub limit_obstacle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub r_lava: f64,
    pub r_back: f64,
    pub r_goal: f64,
    pub dominated: bool,
}

/// `--front` prints the front as CSV; `--random-rewards` prints the fraction
/// summary as CSV; `--check-theorems` prints one PASS/FAIL line per check.
pub fn pareto(args: &ParetoArgs, global: &Global, out: &mut dyn Write) -> Result<i32> {
    let loaded = load_world(&args.env, args.map.as_deref())?;
    let mdp = loaded.tiered(args.rule, args.k)?;
    if !mdp.is_goal_obstacle() {
        bail!(
            "{} with these tiers has no absorbing obstacle tier; dominance needs one",
            args.env
        );
    }
    let horizon = global.horizon.unwrap_or(DEFAULT_HORIZON);
    let front = pareto_front(&mdp, horizon, args.budget)?;
    if let Some(dir) = &global.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut code = 0;
    if args.front {
        let rows = front_rows(&front);
        out.write_all(csvio::to_string(&rows)?.as_bytes())?;
        if let Some(dir) = &global.out {
            csvio::write(&dir.join("front.csv"), &rows)?;
            let (series, named) = series_rows(&loaded, &mdp, &front);
            csvio::write(&dir.join("area_series.csv"), &series)?;
            let mut legend = String::from("policy_id,name\n");
            for (id, name) in named {
                legend.push_str(&format!("{id},{name}\n"));
            }
            std::fs::write(dir.join("area_series_names.csv"), legend)?;
        }
    }
    if args.check_theorems {
        code = code.max(check_theorems(args, global, &mdp, &front, out)?);
    }
    if let Some(n) = args.random_rewards {
        let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
        let f = dominated_fraction_in(&mdp, &front, n, (args.bounds[0], args.bounds[1]), &mut rng)?;
        let summary = [FractionRow {
            n_samples: f.n_samples,
            n_dominated: f.n_dominated,
            fraction: f.fraction,
            seed: global.seed,
        }];
        out.write_all(csvio::to_string(&summary)?.as_bytes())?;
        eprintln!(
            "within sample: {} of {} dominated by another sampled reward's policy",
            f.n_dominated_within_sample, f.n_samples
        );
        if let Some(dir) = &global.out {
            csvio::write(&dir.join("fraction.csv"), &summary)?;
            let samples: Vec<SampleRow> = f
                .samples
                .iter()
                .map(|&([r_lava, r_back, r_goal], dominated)| SampleRow {
                    r_lava,
                    r_back,
                    r_goal,
                    dominated,
                })
                .collect();
            csvio::write(&dir.join("samples.csv"), &samples)?;
        }
    }
    Ok(code)
}

pub fn front_rows(front: &ParetoFront) -> Vec<FrontRow> {
    front
        .classes
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            c.policy_ids.iter().map(move |&id| FrontRow {
                class: i,
                policy_id: id,
                limit_goal: c.stats.limit_goal,
                limit_obstacle: c.stats.limit_obstacle,
            })
        })
        .collect()
}

/// Bands for the first member of every front class and for each constant-action policy.
fn series_rows(
    loaded: &LoadedWorld,
    mdp: &TierMdp,
    front: &ParetoFront,
) -> (Vec<SeriesRow>, Vec<(u64, String)>) {
    let mut named: Vec<(u64, String)> = front
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.policy_ids[0], format!("front_class_{i}")))
        .collect();
    for a in 0..mdp.n_actions() {
        let p = DeterministicPolicy::constant(mdp, a);
        named.push((
            front.space.id_of(&p),
            format!("always_{}", loaded.world.actions.name(a)),
        ));
    }
    let mut rows = Vec::new();
    for (id, _) in &named {
        let band = area_plot_data(&reach_stats(mdp, &front.space.policy(*id), front.horizon));
        for (t, (&upper, &lower)) in band.upper.iter().zip(&band.lower).enumerate() {
            rows.push(SeriesRow {
                t,
                upper,
                lower,
                policy_id: *id,
            });
        }
    }
    (rows, named)
}

fn check_theorems(
    args: &ParetoArgs,
    global: &Global,
    mdp: &TierMdp,
    front: &ParetoFront,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut code = 0;
    if mdp.k() == 3 {
        let mut rng = ChaCha8Rng::seed_from_u64(global.seed);
        let mut bad = 0;
        for _ in 0..args.samples {
            let (o, b, g) = sample_tiered_3(&mut rng, mdp.gamma());
            if !verify_theorem1_with(front, mdp, [o, b, g])? {
                bad += 1;
            }
        }
        let verdict = if bad == 0 { "PASS" } else { "FAIL" };
        writeln!(
            out,
            "{verdict} three-tier: {bad} of {} sampled tiered rewards induce a dominated policy",
            args.samples
        )?;
        if bad > 0 {
            code = 1;
        }
    } else {
        writeln!(out, "SKIP three-tier: the MDP has {} tiers", mdp.k())?;
    }
    let v = build_tiered_reward(mdp.k(), mdp.gamma(), args.delta)?;
    match theorem2_counterexample(mdp, &v, front.horizon, args.budget)? {
        None => writeln!(
            out,
            "PASS k-tier: no policy beats the constructed reward's policy on every tier (k={})",
            mdp.k()
        )?,
        Some(id) => {
            writeln!(out, "FAIL k-tier: policy {id} beats the constructed reward's policy on every tier (k={})", mdp.k())?;
            code = 1;
        }
    }
    match theorem2_occupancy_counterexample(mdp, &v, front.horizon, args.budget)? {
        None => writeln!(out, "PASS k-tier occupancy: no policy beats the constructed reward's policy on expected time per tier")?,
        Some(id) => {
            writeln!(out, "FAIL k-tier occupancy: policy {id} beats the constructed reward's policy on expected time per tier")?;
            code = 1;
        }
    }
    Ok(code)
}
