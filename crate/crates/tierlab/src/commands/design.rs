use std::io::Write;

use anyhow::{Context, Result};
use tierlab_core::reward::{build_tiered_reward, check_tiered_k, scale_to_unit};

use crate::cli::{DesignArgs, Global};
use crate::exact::{parse_decimal, scale_exact, tiered_exact, to_f64};
use crate::numfmt::join_sig15;
use crate::rewardfile;

/// Tier values for `design`. `gamma` and `delta` are read as exact decimals and
/// the recursion is carried out over rationals, then rounded once. If rounding
/// breaks the strict chain at the float `gamma`, the float construction is used.
pub fn design_values(k: usize, gamma: &str, delta: &str, scale: bool) -> Result<Vec<f64>> {
    let (g, d): (f64, f64) = (gamma.trim().parse()?, delta.trim().parse()?);
    let float = build_tiered_reward(k, g, d)?;
    let exact = tiered_exact(k, &parse_decimal(gamma)?, &parse_decimal(delta)?)?;
    let rounded = to_f64(&exact);
    if !check_tiered_k(&rounded, g).holds {
        let v = if scale { scale_to_unit(&float)? } else { float };
        return Ok(v.values().to_vec());
    }
    Ok(if scale {
        to_f64(&scale_exact(&exact))
    } else {
        rounded
    })
}

/// Prints the vector on one line; with `--out` also saves it at full precision.
pub fn design(args: &DesignArgs, global: &Global, out: &mut dyn Write) -> Result<i32> {
    let values = design_values(args.k, &args.gamma, &args.delta, args.scale)?;
    writeln!(out, "{}", join_sig15(&values))?;
    if let Some(dir) = &global.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let name = format!(
            "tiered_k{}{}.txt",
            args.k,
            if args.scale { "_scaled" } else { "" }
        );
        let header = format!(
            "k={} gamma={} delta={} scaled={}",
            args.k, args.gamma, args.delta, args.scale
        );
        std::fs::write(dir.join(name), rewardfile::render(&values, Some(&header)))?;
    }
    Ok(0)
}
