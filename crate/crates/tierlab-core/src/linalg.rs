//! Small dense linear solves.

use alloc::vec::Vec;

/// Row-major dense square matrix.
#[derive(Debug, Clone)]
pub struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    pub fn zeros(n: usize) -> Self {
        Dense {
            n,
            data: alloc::vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `self * x = b` by Gaussian elimination with partial pivoting.
    /// Returns `None` when a pivot falls below `1e-14`.
    pub fn solve(mut self, mut b: Vec<f64>) -> Option<Vec<f64>> {
        let n = self.n;
        debug_assert_eq!(b.len(), n);
        for col in 0..n {
            let (piv, max) = (col..n)
                .map(|r| (r, self[(r, col)].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if max < 1e-14 {
                return None;
            }
            if piv != col {
                for c in 0..n {
                    self.data.swap(piv * n + c, col * n + c);
                }
                b.swap(piv, col);
            }
            let d = self[(col, col)];
            for r in col + 1..n {
                let f = self[(r, col)] / d;
                if f == 0.0 {
                    continue;
                }
                for c in col..n {
                    let v = self[(col, c)];
                    self[(r, c)] -= f * v;
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = alloc::vec![0.0; n];
        for r in (0..n).rev() {
            let mut acc = b[r];
            for c in r + 1..n {
                acc -= self[(r, c)] * x[c];
            }
            x[r] = acc / self[(r, r)];
        }
        Some(x)
    }
}

impl core::ops::Index<(usize, usize)> for Dense {
    type Output = f64;
    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Dense {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut m = Dense::zeros(2);
        m[(0, 0)] = 0.0;
        m[(0, 1)] = 2.0;
        m[(1, 0)] = 3.0;
        m[(1, 1)] = 1.0;
        let x = m.solve(alloc::vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_is_none() {
        let m = Dense::zeros(3);
        assert!(m.solve(alloc::vec![1.0, 1.0, 1.0]).is_none());
    }
}
