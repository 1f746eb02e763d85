use std::io::Write;

use anyhow::{Context, Result};

use crate::cli::{Global, TiermapArgs};
use crate::maps::{load_world, render_tier_map};

pub fn tiermap(args: &TiermapArgs, global: &Global, out: &mut dyn Write) -> Result<i32> {
    let loaded = load_world(&args.env, args.map.as_deref())?;
    let mdp = loaded.tiered(args.rule, args.k)?;
    let text = render_tier_map(&loaded.world, &mdp);
    out.write_all(text.as_bytes())?;
    if let Some(dir) = &global.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(
            dir.join(format!("{}_k{}_tiers.txt", loaded.preset.name(), mdp.k())),
            text,
        )?;
    }
    Ok(0)
}
