use super::{Matrix, SymmetricMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Components below this magnitude are skipped when fixing the sign of an
/// eigenvector.
const SIGN_GAUGE_FLOOR: f64 = 1e-10;

/// Eigenvalues in ascending order with the matching orthonormal
/// eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    vectors: Matrix,
}

impl Spectrum {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors().column(k)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest `‖A v_k − λ_k v_k‖₂` over all pairs.
    pub fn max_residual(&self, a: &SymmetricMatrix) -> f64 {
        let dense = a.to_dense();
        (0..self.len())
            .map(|k| {
                let v = self.vector(k);
                let av = dense.mul_vec(&v);
                av.iter()
                    .zip(&v)
                    .map(|(x, y)| (x - self.values[k] * y).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let v = self.vectors();
        let vtv = &v.transpose() * v;
        (&vtv - &Matrix::identity(self.len())).max_abs()
    }

    /// `‖A − V diag(λ) Vᵀ‖_F`.
    pub fn reconstruction_error(&self, a: &SymmetricMatrix) -> f64 {
        let v = self.vectors();
        let vl = Matrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.values[j]);
        let rebuilt = &vl * &v.transpose();
        (&a.to_dense() - &rebuilt).frobenius_norm()
    }
}

/// Full eigendecomposition of a symmetric matrix by the cyclic Jacobi
/// method.
///
/// Sweeps visit `(p, q)` pairs row by row, so the result is reproducible
/// bit-for-bit on a given platform. Eigenvalues come back ascending and
/// every eigenvector has its first non-negligible component positive.
pub fn sym_eigen(a: &SymmetricMatrix) -> Result<Spectrum> {
    a.ensure_finite()?;
    let n = a.size();
    let mut m = a.to_dense();
    let mut v = Matrix::identity(n);

    let mut converged = n == 1;
    let mut off_norm = 0.0;
    for sweep in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| m[(p, q)].abs())
            .sum();
        off_norm = off;
        if off == 0.0 {
            converged = true;
            break;
        }
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                let g = 100.0 * apq.abs();
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm,
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&k| m[(k, k)]).collect();
    let mut vectors = Matrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    for j in 0..n {
        let lead = (0..n)
            .map(|i| vectors[(i, j)])
            .find(|x| x.abs() > SIGN_GAUGE_FLOOR)
            .unwrap_or(0.0);
        if lead < 0.0 {
            for i in 0..n {
                vectors[(i, j)] = -vectors[(i, j)];
            }
        }
    }
    Ok(Spectrum { values, vectors })
}

/// One Jacobi rotation annihilating `m[p][q]`, accumulated into `v`.
fn rotate(m: &mut Matrix, v: &mut Matrix, p: usize, q: usize) {
    let n = m.rows();
    let apq = m[(p, q)];
    let h = m[(q, q)] - m[(p, p)];
    let g = 100.0 * apq.abs();
    let t = if h.abs() + g == h.abs() {
        apq / h
    } else {
        let theta = 0.5 * h / apq;
        let t = 1.0 / (theta.abs() + (1.0 + theta * theta).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let tau = s / (1.0 + c);
    let shift = t * apq;
    m[(p, p)] -= shift;
    m[(q, q)] += shift;
    m[(p, q)] = 0.0;
    m[(q, p)] = 0.0;
    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = m[(r, p)];
        let arq = m[(r, q)];
        let new_rp = arp - s * (arq + arp * tau);
        let new_rq = arq + s * (arp - arq * tau);
        m[(r, p)] = new_rp;
        m[(p, r)] = new_rp;
        m[(r, q)] = new_rq;
        m[(q, r)] = new_rq;
    }
    for r in 0..n {
        let vrp = v[(r, p)];
        let vrq = v[(r, q)];
        v[(r, p)] = vrp - s * (vrq + vrp * tau);
        v[(r, q)] = vrq + s * (vrp - vrq * tau);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reflection_matrix() {
        let a = SymmetricMatrix::tridiagonal(&[1.0], &[0.0, 0.0]).unwrap();
        let s = sym_eigen(&a).unwrap();
        assert!((s.values()[0] + 1.0).abs() < 1e-15);
        assert!((s.values()[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identity_spectrum() {
        let s = sym_eigen(&SymmetricMatrix::identity(5).unwrap()).unwrap();
        assert!(s.values().iter().all(|&v| v == 1.0));
        assert_eq!(s.orthonormality_defect(), 0.0);
    }

    #[test]
    fn anti_krawtchouk_n2_block() {
        // Characteristic polynomial of tridiag(a, b) with b = (3/2, 0, 0),
        // a = (√2, √(5/4)) factors as (λ + 3/2)(λ − 1/2)(λ − 5/2).
        let a = SymmetricMatrix::tridiagonal(&[2f64.sqrt(), 1.25f64.sqrt()], &[1.5, 0.0, 0.0]).unwrap();
        let s = sym_eigen(&a).unwrap();
        for (got, want) in s.values().iter().zip([-1.5, 0.5, 2.5]) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
        let prod: f64 = s.values().iter().product();
        assert!((prod + 15.0 / 8.0).abs() < 1e-13);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = SymmetricMatrix::identity(3).unwrap();
        a.set(2, 1, f64::NAN);
        assert!(matches!(sym_eigen(&a), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn eigenvectors_sign_gauged() {
        let a = SymmetricMatrix::from_lower_fn(6, |i, j| 1.0 / (1 + i + j) as f64).unwrap();
        let s = sym_eigen(&a).unwrap();
        for k in 0..6 {
            let v = s.vector(k);
            let lead = v.iter().find(|x| x.abs() > SIGN_GAUGE_FLOOR).unwrap();
            assert!(*lead > 0.0);
        }
    }

    #[test]
    fn deterministic_across_runs() {
        let a = SymmetricMatrix::from_lower_fn(12, |i, j| ((i * 7 + j * 3) % 5) as f64 - 2.0).unwrap();
        let s1 = sym_eigen(&a).unwrap();
        let s2 = sym_eigen(&a).unwrap();
        assert_eq!(s1.values(), s2.values());
        assert_eq!(s1.vectors(), s2.vectors());
    }

    proptest! {
        #[test]
        fn decomposition_invariants(
            n in 1usize..14,
            seed in proptest::collection::vec(-10.0f64..10.0, 14 * 15 / 2),
        ) {
            let a = SymmetricMatrix::from_lower_fn(n, |i, j| seed[i * (i + 1) / 2 + j]).unwrap();
            let s = sym_eigen(&a).unwrap();
            let norm = a.frobenius_norm().max(1e-30);
            prop_assert!(s.values().windows(2).all(|w| w[0] <= w[1]));
            prop_assert!(s.orthonormality_defect() <= 1e-12);
            prop_assert!(s.max_residual(&a) <= 1e-10 * norm);
            prop_assert!(s.reconstruction_error(&a) <= 1e-10 * norm);
        }
    }
}
