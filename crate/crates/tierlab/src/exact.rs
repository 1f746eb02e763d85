//! Decimal inputs taken at face value and the tiered construction over rationals.

use anyhow::{bail, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Parses `[-]digits[.digits][e[-]digits]` exactly.
pub fn parse_decimal(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (
            &t[..i],
            t[i + 1..]
                .parse::<i32>()
                .map_err(|_| anyhow::anyhow!("bad exponent in `{s}`"))?,
        ),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty()
        || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
    {
        bail!("`{s}` is not a decimal number");
    }
    let digits: BigInt = format!("0{int}{frac}").parse()?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// `r_k = 0`, `r_i = r_{i+1} / (1 - gamma) - delta`, exactly.
pub fn tiered_exact(
    k: usize,
    gamma: &BigRational,
    delta: &BigRational,
) -> Result<Vec<BigRational>> {
    if k < 2 {
        bail!("k must be at least 2, got {k}");
    }
    if !(gamma.is_positive() && *gamma < BigRational::one()) {
        bail!("gamma must lie in (0,1)");
    }
    if !delta.is_positive() {
        bail!("delta must be positive");
    }
    let c = (BigRational::one() - gamma).recip();
    let mut v = vec![BigRational::zero(); k];
    for i in (0..k - 1).rev() {
        v[i] = &c * &v[i + 1] - delta;
    }
    Ok(v)
}

/// Divides by `|r_1|`.
pub fn scale_exact(v: &[BigRational]) -> Vec<BigRational> {
    let s = v[0].abs();
    v.iter().map(|x| x / &s).collect()
}

pub fn to_f64(v: &[BigRational]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}
