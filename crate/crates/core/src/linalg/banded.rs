use serde::{Deserialize, Serialize};

use super::{Matrix, SymmetricMatrix};
use crate::error::{invalid, Error, Result};

/// Square matrix with a declared bandwidth.
///
/// `diagonals[bandwidth + k]` holds the entries `(i, i + k)` for offsets
/// `k` in `-bandwidth..=bandwidth`, so diagonal `k` has `size - |k|` values.
/// Every entry outside the band is exactly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandedOperator {
    size: usize,
    bandwidth: usize,
    diagonals: Vec<Vec<f64>>,
}

impl BandedOperator {
    pub fn zeros(size: usize, bandwidth: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("size", "banded operator must have size >= 1"));
        }
        let bandwidth = bandwidth.min(size - 1);
        let diagonals = (0..=2 * bandwidth)
            .map(|d| vec![0.0; size - d.abs_diff(bandwidth)])
            .collect();
        Ok(Self {
            size,
            bandwidth,
            diagonals,
        })
    }

    /// Extracts the band of a dense matrix, failing if anything outside the
    /// band is nonzero.
    pub fn from_dense(m: &Matrix, bandwidth: usize) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::SizeMismatch {
                left: m.rows(),
                right: m.cols(),
            });
        }
        let mut out = Self::zeros(m.rows(), bandwidth)?;
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m[(i, j)];
                if i.abs_diff(j) > out.bandwidth {
                    if v != 0.0 {
                        return Err(Error::OutsideBand {
                            row: i,
                            col: j,
                            value: v,
                            bandwidth: out.bandwidth,
                        });
                    }
                } else {
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// General tridiagonal operator: `lower[k] = m[k+1][k]`,
    /// `upper[k] = m[k][k+1]`.
    pub fn tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::SizeMismatch {
                left: lower.len().max(upper.len()) + 1,
                right: n,
            });
        }
        let mut out = Self::zeros(n, 1)?;
        for (i, &d) in diag.iter().enumerate() {
            out.set(i, i, d);
        }
        for k in 0..n.saturating_sub(1) {
            out.set(k + 1, k, lower[k]);
            out.set(k, k + 1, upper[k]);
        }
        Ok(out)
    }

    pub fn symmetric_tridiagonal(off: &[f64], diag: &[f64]) -> Result<Self> {
        Self::tridiagonal(off, diag, off)
    }

    pub fn diagonal_matrix(diag: &[f64]) -> Result<Self> {
        let mut out = Self::zeros(diag.len(), 0)?;
        out.diagonals[0].copy_from_slice(diag);
        Ok(out)
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Values on the diagonal at `offset` (negative = below the main one).
    pub fn diagonal(&self, offset: isize) -> &[f64] {
        let idx = self.bandwidth as isize + offset;
        assert!(
            idx >= 0 && (idx as usize) < self.diagonals.len(),
            "offset {offset} outside bandwidth {}",
            self.bandwidth
        );
        &self.diagonals[idx as usize]
    }

    pub fn diagonals(&self) -> &[Vec<f64>] {
        &self.diagonals
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i >= self.size || j >= self.size || i.abs_diff(j) > self.bandwidth {
            return 0.0;
        }
        let k = j as isize - i as isize;
        let d = &self.diagonals[(self.bandwidth as isize + k) as usize];
        d[i.min(j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = j as isize - i as isize;
        let d = &mut self.diagonals[(self.bandwidth as isize + k) as usize];
        d[i.min(j)] = v;
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.size, self.size, |i, j| self.get(i, j))
    }

    pub fn is_symmetric(&self) -> bool {
        (1..=self.bandwidth as isize).all(|k| self.diagonal(k) == self.diagonal(-k))
    }

    /// Symmetric view; fails unless the operator is exactly symmetric.
    pub fn to_symmetric(&self) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_dense(&self.to_dense(), 0.0)
    }

    /// Largest magnitude on any off-diagonal of the band.
    pub fn max_off_diagonal(&self) -> f64 {
        (1..=self.bandwidth as isize)
            .flat_map(|k| self.diagonal(k).iter().chain(self.diagonal(-k)))
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Smallest bandwidth that still holds every nonzero entry.
    pub fn effective_bandwidth(&self) -> usize {
        (1..=self.bandwidth)
            .rev()
            .find(|&k| {
                let k = k as isize;
                self.diagonal(k).iter().chain(self.diagonal(-k)).any(|v| *v != 0.0)
            })
            .unwrap_or(0)
    }

    pub fn leading_block(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.size {
            return Err(invalid("block", format!("block size {k} not in 1..={}", self.size)));
        }
        Self::from_dense(&self.to_dense().leading_block(k), self.bandwidth)
    }
}

impl From<&BandedOperator> for Matrix {
    fn from(b: &BandedOperator) -> Self {
        b.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_beyond_band_rejected() {
        let mut m = Matrix::identity(4);
        m[(0, 3)] = 1e-300;
        assert!(matches!(
            BandedOperator::from_dense(&m, 2),
            Err(Error::OutsideBand { row: 0, col: 3, .. })
        ));
        assert!(BandedOperator::from_dense(&m, 3).is_ok());
    }

    #[test]
    fn tridiagonal_layout() {
        let t = BandedOperator::tridiagonal(&[1.0, 2.0], &[5.0, 6.0, 7.0], &[3.0, 4.0]).unwrap();
        assert_eq!(t.get(1, 0), 1.0);
        assert_eq!(t.get(0, 1), 3.0);
        assert_eq!(t.get(2, 0), 0.0);
        assert!(!t.is_symmetric());
        assert_eq!(t.effective_bandwidth(), 1);
    }

    #[test]
    fn bandwidth_clamped_to_size() {
        let b = BandedOperator::zeros(2, 5).unwrap();
        assert_eq!(b.bandwidth(), 1);
    }
}
