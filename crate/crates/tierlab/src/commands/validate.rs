use std::io::Write;

use anyhow::{bail, Context, Result};
use tierlab_core::reward::{check_tiered_3_links, check_tiered_k};

use crate::cli::ValidateArgs;
use crate::numfmt::sig15;
use crate::rewardfile;

/// Exit code 0 when the values are a tiered reward, 1 when a link fails.
pub fn validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&args.file)
        .with_context(|| format!("reading {}", args.file.display()))?;
    let v = rewardfile::parse(&text)?;
    let gamma = args.gamma;
    if !(gamma > 0.0 && gamma < 1.0) {
        bail!("gamma must lie in (0,1), got {gamma}");
    }
    if v.len() < 2 {
        bail!("need at least 2 tier values, got {}", v.len());
    }
    let c = 1.0 / (1.0 - gamma);
    let three = v.len() == 3 && !args.chain;
    let check = if three {
        check_tiered_3_links(v[0], v[1], v[2], gamma)
    } else {
        check_tiered_k(&v, gamma)
    };
    let form = if three {
        "r_obs < r_back/(1-gamma) < r_goal"
    } else {
        "r_1 < c r_2 < .. < c^(k-1) r_k <= 0"
    };
    writeln!(out, "k={} gamma={} check: {form}", v.len(), sig15(gamma))?;
    let Some(link) = check.first_violation else {
        writeln!(out, "PASS")?;
        return Ok(0);
    };
    let detail = if three {
        let mid = c * v[1];
        match link {
            1 => format!(
                "r_obs < r_back/(1-gamma) fails: {} vs {}",
                sig15(v[0]),
                sig15(mid)
            ),
            _ => format!(
                "r_back/(1-gamma) < r_goal fails: {} vs {}",
                sig15(mid),
                sig15(v[2])
            ),
        }
    } else if link < v.len() {
        format!(
            "r_{link} < r_{}/(1-gamma) fails: {} vs {}",
            link + 1,
            sig15(v[link - 1]),
            sig15(c * v[link])
        )
    } else {
        format!("r_{link} <= 0 fails: r_{link} = {}", sig15(v[link - 1]))
    };
    writeln!(out, "FAIL link {link}: {detail}")?;
    Ok(1)
}
