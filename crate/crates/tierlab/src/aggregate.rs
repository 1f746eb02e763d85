use anyhow::{bail, Result};

use crate::csvio::AggregateRow;

/// Per-episode mean and sample standard deviation of steps across seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub n_seeds: usize,
}

impl AggregateCurve {
    /// `per_seed[i][e]` is the step count of episode `e` for seed `i`, in seed order.
    pub fn from_steps(per_seed: &[Vec<usize>]) -> Result<Self> {
        let n = per_seed.len();
        if n < 2 {
            bail!("an aggregate needs at least 2 seeds, got {n}");
        }
        let len = per_seed[0].len();
        if per_seed.iter().any(|c| c.len() != len) {
            bail!("seed curves differ in length");
        }
        let mut mean = Vec::with_capacity(len);
        let mut std = Vec::with_capacity(len);
        for e in 0..len {
            let m = per_seed.iter().map(|c| c[e] as f64).sum::<f64>() / n as f64;
            let ss: f64 = per_seed.iter().map(|c| (c[e] as f64 - m).powi(2)).sum();
            mean.push(m);
            std.push((ss / (n - 1) as f64).sqrt());
        }
        Ok(AggregateCurve {
            mean,
            std,
            n_seeds: n,
        })
    }

    pub fn rows(&self) -> Vec<AggregateRow> {
        self.mean
            .iter()
            .zip(&self.std)
            .enumerate()
            .map(|(i, (&m, &s))| AggregateRow {
                episode: i + 1,
                mean_steps: m,
                std_steps: s,
                n_seeds: self.n_seeds,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_seeds() {
        let a = AggregateCurve::from_steps(&[vec![10, 4], vec![20, 4]]).unwrap();
        assert_eq!(a.mean, vec![15.0, 4.0]);
        assert!((a.std[0] - 50f64.sqrt()).abs() < 1e-12);
        assert_eq!(a.std[1], 0.0);
    }

    #[test]
    fn one_seed_is_refused() {
        assert!(AggregateCurve::from_steps(&[vec![1, 2]]).is_err());
        assert!(AggregateCurve::from_steps(&[vec![1, 2], vec![1]]).is_err());
    }
}
