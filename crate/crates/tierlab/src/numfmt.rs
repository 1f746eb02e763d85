/// Rounds to 15 significant digits and prints the shortest decimal for the result.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.14e}")
        .parse()
        .expect("scientific float formatting reparses");
    if rounded == 0.0 {
        "0".to_string()
    } else {
        rounded.to_string()
    }
}

pub fn join_sig15(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| sig15(v))
        .collect::<Vec<_>>()
        .join(" ")
}
