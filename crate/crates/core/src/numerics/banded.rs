//! Cholesky factorisation of real symmetric positive definite banded matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

use super::NumericsError;

/// Lower band of an `n x n` SPD matrix with half-bandwidth `bw`.
///
/// Entry `(i, j)` with `i - bw <= j <= i` lives at `band[i * (bw + 1) + (i - j)]`.
#[derive(Clone, Debug)]
pub struct BandedSpd {
    n: usize,
    bw: usize,
    band: Vec<f64>,
    factored: bool,
}

impl BandedSpd {
    pub fn zeros(n: usize, bw: usize) -> Self {
        Self { n, bw, band: vec![0.0; n * (bw + 1)], factored: false }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i - j <= self.bw);
        i * (self.bw + 1) + (i - j)
    }

    /// Adds `value` to entry `(i, j)`; only the lower triangle is stored, so `(j, i)` is implied.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        assert!(i - j <= self.bw, "entry outside the band");
        let k = self.idx(i, j);
        self.band[k] += value;
    }

    /// In-place `A = L Lᵀ`.
    pub fn factor(&mut self) -> Result<(), NumericsError> {
        let (n, bw) = (self.n, self.bw);
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = self.band[self.idx(i, j)];
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= self.band[self.idx(i, k)] * self.band[self.idx(j, k)];
                }
                if i == j {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(NumericsError::NotPositiveDefinite { row: i });
                    }
                    let k = self.idx(i, i);
                    self.band[k] = Float::sqrt(s);
                } else {
                    let k = self.idx(i, j);
                    self.band[k] = s / self.band[self.idx(j, j)];
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` after [`BandedSpd::factor`].
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert!(self.factored, "solve called before factor");
        let (n, bw) = (self.n, self.bw);
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.band[self.idx(i, k)] * y[k];
            }
            y[i] = s / self.band[self.idx(i, i)];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n.min(i + bw + 1) {
                s -= self.band[self.idx(k, i)] * y[k];
            }
            y[i] = s / self.band[self.idx(i, i)];
        }
        y
    }
}
