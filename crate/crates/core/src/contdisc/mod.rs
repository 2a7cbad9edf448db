//! Classical continuous families seen through the discrete lens: kernel
//! matrices of partial orthogonality integrals, the tridiagonal matrix that
//! commutes with them, and exact differential-operator identities.

mod family;
mod quadrature;
mod symbolic;

use serde::{Deserialize, Serialize};

pub use family::{make_family, ClassicalFamily, FamilyKind};
pub use quadrature::{
    gauss_legendre, gram_matrix, kernel_matrix_quadrature, orthogonality_residual, KernelMatrixQ, CAUCHY_TOL,
    PANEL_NODES, TAIL_TOL,
};
pub use symbolic::{
    bessel_boundary, bessel_defect, bessel_l, bessel_operator, divergence_form_operator, prolate_boundary,
    prolate_defect, prolate_operator, tilde_d_operator, verify_bessel_identity, verify_prolate_identity,
    verify_tilde_d, IdentityCheck, TildeDReport, IDENTITY_TOL,
};

use crate::error::{invalid, Error, Result};
use crate::limiting::require_simple_spectrum;
use crate::linalg::{commutator, commutator_residual, sym_eigen, Matrix, SymmetricMatrix};

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("N", "N must be at least 1"));
    }
    Ok(())
}

/// `½{L_N, Λ_N} − WΛ_N + σL_N` for an explicit `σ`.
pub fn commuting_matrix_with_sigma(family: &ClassicalFamily, n: usize, w: f64, sigma: f64) -> Result<SymmetricMatrix> {
    check_n(n)?;
    let (a, b) = family.recurrence_coeffs(n + 1);
    let lam: Vec<f64> = (0..=n).map(|k| family.eigenvalue(k)).collect();
    let diag: Vec<f64> = (0..=n).map(|k| lam[k] * b[k] - w * lam[k] + sigma * b[k]).collect();
    let off: Vec<f64> = (0..n).map(|k| (0.5 * (lam[k] + lam[k + 1]) + sigma) * a[k]).collect();
    SymmetricMatrix::tridiagonal(&off, &diag)
}

/// The commuting matrix with the tabulated `σ_N`.
pub fn commuting_matrix(family: &ClassicalFamily, n: usize, w: f64) -> Result<SymmetricMatrix> {
    commuting_matrix_with_sigma(family, n, w, family.sigma(n))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigmaFit {
    pub fitted: f64,
    pub table: f64,
    /// `‖[T(σ*), K]‖` relative at the fitted value.
    pub residual: f64,
}

/// Closed-form least squares `σ* = −⟨[B,K],[L,K]⟩ / ‖[L,K]‖²` with
/// `B = ½{L,Λ} − WΛ`.
pub fn fit_sigma(family: &ClassicalFamily, n: usize, w: f64, k: &SymmetricMatrix) -> Result<SigmaFit> {
    let kd = k.to_dense();
    let b = commuting_matrix_with_sigma(family, n, w, 0.0)?.to_dense();
    let (la, lb) = family.recurrence_coeffs(n + 1);
    let l = Matrix::tridiagonal(&la, &lb);
    let cb = commutator(&b, &kd)?;
    let cl = commutator(&l, &kd)?;
    let dot = |x: &Matrix, y: &Matrix| x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| p * q).sum::<f64>();
    let denom = dot(&cl, &cl);
    if denom.sqrt() <= 1e-12 * l.frobenius_norm() * kd.frobenius_norm() {
        return Err(Error::Infeasible("[L, K] vanishes; sigma is undetermined".into()));
    }
    let fitted = -dot(&cb, &cl) / denom;
    let t = commuting_matrix_with_sigma(family, n, w, fitted)?.to_dense();
    Ok(SigmaFit {
        fitted,
        table: family.sigma(n),
        residual: commutator_residual(&t, &kd)?,
    })
}

/// Everything computed for one `(family, N, W)` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContdiscReport {
    pub family: FamilyKind,
    pub n: usize,
    pub w: f64,
    pub sigma: f64,
    pub kernel: KernelMatrixQ,
    pub commuting: SymmetricMatrix,
    /// `‖[T, K]‖ / (‖T‖‖K‖)`.
    pub commutator_residual: f64,
    pub sigma_fit: Option<SigmaFit>,
    /// Largest off-diagonal entry of `VᵀKV` over the largest entry of `K`,
    /// with `V` the eigenvectors of `T`.
    pub offdiag_in_t_basis: f64,
    /// Eigenvalues of `K`, ascending.
    pub kernel_eigenvalues: Vec<f64>,
    /// Eigenvalues of `T`, ascending.
    pub commuting_eigenvalues: Vec<f64>,
}

pub fn analyze_contdisc(family: &ClassicalFamily, n: usize, w: f64) -> Result<ContdiscReport> {
    check_n(n)?;
    let kernel = kernel_matrix_quadrature(family, n, w)?;
    let t = commuting_matrix(family, n, w)?;
    let kd = kernel.matrix.to_dense();
    let commutator_residual = commutator_residual(&t.to_dense(), &kd)?;
    let sigma_fit = match fit_sigma(family, n, w, &kernel.matrix) {
        Ok(f) => Some(f),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };
    let spec_t = sym_eigen(&t)?;
    require_simple_spectrum(spec_t.values())?;
    let v = spec_t.vectors();
    let rotated = v.transpose().try_mul(&kd)?.try_mul(v)?;
    let mut off = 0.0f64;
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                off = off.max(rotated[(i, j)].abs());
            }
        }
    }
    Ok(ContdiscReport {
        family: family.kind(),
        n,
        w,
        sigma: family.sigma(n),
        commutator_residual,
        sigma_fit,
        offdiag_in_t_basis: off / kd.max_abs().max(f64::MIN_POSITIVE),
        kernel_eigenvalues: sym_eigen(&kernel.matrix)?.values().to_vec(),
        commuting_eigenvalues: spec_t.values().to_vec(),
        kernel,
        commuting: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalue_maps() {
        let h = make_family(FamilyKind::Hermite).unwrap();
        assert_eq!(h.eigenvalue(3), -6.0);
        let j = make_family(FamilyKind::Jacobi { alpha: 0.0, beta: 0.0 }).unwrap();
        assert_eq!(j.eigenvalue(4), -20.0);
        let l = make_family(FamilyKind::Laguerre { alpha: 0.0 }).unwrap();
        assert_eq!(l.eigenvalue(5), -5.0);
    }

    #[test]
    fn sigma_table() {
        let h = make_family(FamilyKind::Hermite).unwrap();
        let l = make_family(FamilyKind::Laguerre { alpha: 0.0 }).unwrap();
        let j = make_family(FamilyKind::Jacobi { alpha: 0.0, beta: 0.0 }).unwrap();
        assert_eq!(h.sigma(10), 21.0);
        assert_eq!(l.sigma(10), 10.5);
        assert_eq!(j.sigma(10), 121.0);
    }

    #[test]
    fn unsupported_parameters_rejected() {
        assert!(make_family(FamilyKind::Laguerre { alpha: 0.5 }).is_err());
        assert!(make_family(FamilyKind::Jacobi { alpha: -0.5, beta: 0.0 }).is_err());
    }

    #[test]
    fn weights_have_unit_mass_scale() {
        let j = make_family(FamilyKind::Jacobi { alpha: 0.0, beta: 0.0 }).unwrap();
        assert!((j.weight(0.3) - 0.5).abs() < 1e-15);
        let h = make_family(FamilyKind::Hermite).unwrap();
        assert!((h.weight(0.0) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }
}
