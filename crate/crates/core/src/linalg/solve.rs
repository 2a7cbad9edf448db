use super::Matrix;
use crate::error::{Error, Result};

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if !a.is_square() || b.len() != n {
        return Err(Error::SizeMismatch {
            left: a.rows(),
            right: b.len().max(a.cols()),
        });
    }
    a.ensure_finite()?;
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    let mut m = a.clone();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let (piv, pval) = (col..n)
            .map(|r| (r, m[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if pval <= 1e-14 * scale {
            return Err(Error::Singular {
                column: col,
                pivot: pval,
            });
        }
        if piv != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
            rhs.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                m[(r, j)] -= f * m[(col, j)];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| m[(i, j)] * x[j]).sum();
        x[i] = (rhs[i] - s) / m[(i, i)];
    }
    Ok(x)
}

/// Least-squares fit of `b` by the columns of `a` (Householder QR).
///
/// Returns the coefficients and the residual norm `‖A x − b‖₂`.
pub fn least_squares(a: &Matrix, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m || m < n {
        return Err(Error::SizeMismatch {
            left: m,
            right: b.len(),
        });
    }
    let mut r = a.clone();
    let mut qtb = b.to_vec();
    let scale = a.max_abs().max(f64::MIN_POSITIVE);
    for k in 0..n {
        let norm = (k..m).map(|i| r[(i, k)].powi(2)).sum::<f64>().sqrt();
        if norm <= 1e-14 * scale {
            return Err(Error::Singular { column: k, pivot: norm });
        }
        let alpha = if r[(k, k)] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..n {
            let dot: f64 = (k..m).map(|i| v[i - k] * r[(i, j)]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let dot: f64 = (k..m).map(|i| v[i - k] * qtb[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in k..m {
            qtb[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| r[(i, j)] * x[j]).sum();
        x[i] = (qtb[i] - s) / r[(i, i)];
    }
    let residual = qtb[n..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((x, residual))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]).unwrap();
        let x = solve_dense(&a, &[5.0, 3.0, 6.0]).unwrap();
        let back = a.mul_vec(&x);
        for (u, v) in back.iter().zip([5.0, 3.0, 6.0]) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_detected() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(solve_dense(&a, &[1.0, 2.0]), Err(Error::Singular { .. })));
    }

    #[test]
    fn least_squares_exact_fit_and_residual() {
        // y = 1 + 2t sampled exactly, plus an inconsistent column-space miss.
        let a = Matrix::from_fn(4, 2, |i, j| if j == 0 { 1.0 } else { i as f64 });
        let (x, res) = least_squares(&a, &[1.0, 3.0, 5.0, 7.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);
        assert!(res < 1e-13);
        let (_, res) = least_squares(&a, &[0.0, 1.0, 0.0, 1.0]).unwrap();
        // Residual of fitting (0,1,0,1) by a line: projection leaves norm 2/√5.
        assert!((res - 2.0 / 5f64.sqrt()).abs() < 1e-13);
    }
}
