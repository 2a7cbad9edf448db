use serde::{Deserialize, Serialize};

use super::Matrix;
use crate::error::{invalid, Error, Result};

/// Real symmetric matrix in packed lower-triangle storage.
///
/// Symmetry holds by construction: `get(i, j)` and `get(j, i)` read the same
/// slot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    size: usize,
    entries: Vec<f64>,
}

#[inline]
fn packed(i: usize, j: usize) -> usize {
    let (r, c) = if i >= j { (i, j) } else { (j, i) };
    r * (r + 1) / 2 + c
}

impl SymmetricMatrix {
    pub fn zeros(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(invalid("size", "symmetric matrix must have size >= 1"));
        }
        Ok(Self {
            size,
            entries: vec![0.0; size * (size + 1) / 2],
        })
    }

    pub fn identity(size: usize) -> Result<Self> {
        let mut m = Self::zeros(size)?;
        for i in 0..size {
            m.set(i, i, 1.0);
        }
        Ok(m)
    }

    /// Fills the lower triangle from `f(i, j)` with `i >= j`.
    pub fn from_lower_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut m = Self::zeros(size)?;
        for i in 0..size {
            for j in 0..=i {
                m.entries[packed(i, j)] = f(i, j);
            }
        }
        Ok(m)
    }

    pub fn tridiagonal(off: &[f64], diag: &[f64]) -> Result<Self> {
        if off.len() + 1 != diag.len() {
            return Err(Error::SizeMismatch {
                left: off.len() + 1,
                right: diag.len(),
            });
        }
        Self::from_lower_fn(diag.len(), |i, j| {
            if i == j {
                diag[i]
            } else if i == j + 1 {
                off[j]
            } else {
                0.0
            }
        })
    }

    /// Accepts a dense matrix whose asymmetry is at most `tol * max|a_ij|`;
    /// the stored value is the average of the two triangles.
    pub fn from_dense(m: &Matrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::SizeMismatch {
                left: m.rows(),
                right: m.cols(),
            });
        }
        let scale = m.max_abs().max(f64::MIN_POSITIVE);
        for i in 0..m.rows() {
            for j in 0..i {
                let defect = (m[(i, j)] - m[(j, i)]).abs();
                if defect > tol * scale {
                    return Err(Error::NotSymmetric { row: i, col: j, defect });
                }
            }
        }
        Self::from_lower_fn(m.rows(), |i, j| 0.5 * (m[(i, j)] + m[(j, i)]))
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[packed(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.entries[packed(i, j)] = v;
    }

    /// Packed lower triangle, row by row.
    pub fn lower_entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix::from_fn(self.size, self.size, |i, j| self.get(i, j))
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.size {
            for j in 0..=i {
                let v = self.get(i, j);
                s += if i == j { v * v } else { 2.0 * v * v };
            }
        }
        s.sqrt()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.size).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        self.diagonal().iter().sum()
    }

    pub fn leading_block(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.size {
            return Err(invalid("block", format!("block size {k} not in 1..={}", self.size)));
        }
        Self::from_lower_fn(k, |i, j| self.get(i, j))
    }

    pub fn ensure_finite(&self) -> Result<()> {
        for i in 0..self.size {
            for j in 0..=i {
                if !self.get(i, j).is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }
}

impl From<&SymmetricMatrix> for Matrix {
    fn from(s: &SymmetricMatrix) -> Self {
        s.to_dense()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_storage_is_symmetric() {
        let mut m = SymmetricMatrix::zeros(3).unwrap();
        m.set(0, 2, 5.0);
        assert_eq!(m.get(2, 0), 5.0);
        assert_eq!(m.to_dense().asymmetry(), 0.0);
    }

    #[test]
    fn zero_size_rejected() {
        assert!(SymmetricMatrix::zeros(0).is_err());
    }

    #[test]
    fn frobenius_counts_both_triangles() {
        let m = SymmetricMatrix::tridiagonal(&[1.0], &[0.0, 0.0]).unwrap();
        assert!((m.frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn asymmetric_dense_rejected() {
        let d = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(
            SymmetricMatrix::from_dense(&d, 1e-12),
            Err(Error::NotSymmetric { .. })
        ));
    }
}
