//! Plain-text reward vectors: reals separated by whitespace or commas, `#` starts a comment.

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("");
        for tok in body
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
        {
            let v: f64 = tok
                .parse()
                .with_context(|| format!("line {}: `{tok}` is not a number", i + 1))?;
            if !v.is_finite() {
                bail!("line {}: `{tok}` is not finite", i + 1);
            }
            out.push(v);
        }
    }
    if out.is_empty() {
        bail!("reward file holds no values");
    }
    Ok(out)
}

/// One value per line at full precision, so [`parse`] gives back the same floats.
pub fn render(values: &[f64], header: Option<&str>) -> String {
    let mut s = String::new();
    if let Some(h) = header {
        for line in h.lines() {
            s.push_str("# ");
            s.push_str(line);
            s.push('\n');
        }
    }
    for v in values {
        s.push_str(&v.to_string());
        s.push('\n');
    }
    s
}
