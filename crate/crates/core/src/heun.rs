//! Algebraic Heun operator `M = τ₁LZ + τ₂ZL + τ₃L + τ₄Z + τ₀I`: assembly,
//! closed-form tridiagonal coefficients, Perline coefficient solvers and the
//! map to classical Heun-equation parameters.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::leonard::{perline_degeneracy_check, Identifiability, LeonardPair};
use crate::linalg::{BandedOperator, Matrix};

/// The five scalars of the bilinear ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeunCoefficients {
    pub tau0: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau3: f64,
    pub tau4: f64,
}

impl HeunCoefficients {
    /// Fails when τ₁..τ₄ all vanish (the operator would be a multiple of
    /// the identity).
    pub fn new(tau0: f64, tau1: f64, tau2: f64, tau3: f64, tau4: f64) -> Result<Self> {
        let t = Self {
            tau0,
            tau1,
            tau2,
            tau3,
            tau4,
        };
        if [tau0, tau1, tau2, tau3, tau4].iter().any(|v| !v.is_finite()) {
            return Err(invalid("tau", "coefficients must be finite"));
        }
        if [tau1, tau2, tau3, tau4].iter().all(|v| *v == 0.0) {
            return Err(invalid("tau", "tau1..tau4 must not all vanish"));
        }
        Ok(t)
    }

    /// Symmetric (Perline) form `τ₁ = τ₂`.
    pub fn is_symmetric(&self) -> bool {
        self.tau1 == self.tau2
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.tau0, self.tau1, self.tau2, self.tau3, self.tau4]
    }
}

/// `τ₁LZ + τ₂ZL + τ₃L + τ₄Z + τ₀I` for dense `L`, `Z`.
pub fn bilinear_combination(l: &Matrix, z: &Matrix, tau: &HeunCoefficients) -> Result<Matrix> {
    let n = l.rows();
    let lz = l.try_mul(z)?;
    let zl = z.try_mul(l)?;
    Ok(Matrix::from_fn(n, n, |i, j| {
        let id = if i == j { tau.tau0 } else { 0.0 };
        tau.tau1 * lz[(i, j)] + tau.tau2 * zl[(i, j)] + tau.tau3 * l[(i, j)] + tau.tau4 * z[(i, j)] + id
    }))
}

/// Assembles `M` in the e-basis from `L = diag(ldiag)` and a tridiagonal
/// `Z` by matrix arithmetic.
pub fn assemble_heun_matrix(ldiag: &[f64], ztri: &BandedOperator, tau: &HeunCoefficients) -> Result<BandedOperator> {
    if ztri.size() != ldiag.len() {
        return Err(Error::SizeMismatch {
            left: ldiag.len(),
            right: ztri.size(),
        });
    }
    if ztri.effective_bandwidth() > 1 {
        return Err(invalid("ztri", "Z must be tridiagonal"));
    }
    let m = bilinear_combination(&Matrix::from_diagonal(ldiag), &ztri.to_dense(), tau)?;
    BandedOperator::from_dense(&m, 1)
}

/// Assembles `M` in the d-basis from a tridiagonal `L` and `Z = diag(zdiag)`.
pub fn assemble_heun_matrix_dual(
    ltri: &BandedOperator,
    zdiag: &[f64],
    tau: &HeunCoefficients,
) -> Result<BandedOperator> {
    if ltri.size() != zdiag.len() {
        return Err(Error::SizeMismatch {
            left: ltri.size(),
            right: zdiag.len(),
        });
    }
    if ltri.effective_bandwidth() > 1 {
        return Err(invalid("ltri", "L must be tridiagonal"));
    }
    let m = bilinear_combination(&ltri.to_dense(), &Matrix::from_diagonal(zdiag), tau)?;
    BandedOperator::from_dense(&m, 1)
}

/// Tridiagonal coefficients of `M` in one basis.
///
/// `lower[n−1] = A_n` is the entry `(n, n−1)`, `upper[n−1] = C_n` the entry
/// `(n−1, n)` for `n = 1..N`, and `diag[n] = B_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TridiagCoefficients {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl TridiagCoefficients {
    pub fn to_banded(&self) -> Result<BandedOperator> {
        BandedOperator::tridiagonal(&self.lower, &self.diag, &self.upper)
    }

    /// `A_n` for `n ≥ 1`.
    pub fn a(&self, n: usize) -> f64 {
        self.lower[n - 1]
    }

    /// `C_n` for `n ≥ 1`.
    pub fn c(&self, n: usize) -> f64 {
        self.upper[n - 1]
    }
}

/// Closed-form coefficients in the e-basis:
/// `A_n = (τ₁λ_n + τ₂λ_{n−1} + τ₄)ξ_n`, `C_n = (τ₁λ_{n−1} + τ₂λ_n + τ₄)ξ_n`,
/// `B_n = (τ₁+τ₂)η_nλ_n + τ₃λ_n + τ₄η_n + τ₀`.
pub fn heun_tridiag_coeffs_e(pair: &LeonardPair, tau: &HeunCoefficients) -> TridiagCoefficients {
    closed_form(pair.lambda(), pair.xi(), pair.eta(), tau.tau4, tau.tau3, tau)
}

/// Closed-form coefficients in the d-basis:
/// `A_n = (τ₁μ_{n−1} + τ₂μ_n + τ₃)a_n`, `C_n = (τ₁μ_n + τ₂μ_{n−1} + τ₃)a_n`,
/// `B_n = (τ₁+τ₂)b_nμ_n + τ₃b_n + τ₄μ_n + τ₀`.
pub fn heun_tridiag_coeffs_d(pair: &LeonardPair, tau: &HeunCoefficients) -> TridiagCoefficients {
    // Swapping the roles of the diagonal and tridiagonal factor exchanges
    // τ₁ ↔ τ₂ and τ₃ ↔ τ₄.
    let swapped = HeunCoefficients {
        tau1: tau.tau2,
        tau2: tau.tau1,
        ..*tau
    };
    closed_form(pair.mu(), pair.a(), pair.b(), tau.tau3, tau.tau4, &swapped)
}

/// Coefficients of `τ₁DT + τ₂TD + c_t T + c_d D + τ₀` for `D = diag(d)`,
/// `T = tridiag(off, diag)`.
fn closed_form(
    d: &[f64],
    off: &[f64],
    diag: &[f64],
    c_t: f64,
    c_d: f64,
    tau: &HeunCoefficients,
) -> TridiagCoefficients {
    let n = d.len();
    let lower = (1..n)
        .map(|k| (tau.tau1 * d[k] + tau.tau2 * d[k - 1] + c_t) * off[k - 1])
        .collect();
    let upper = (1..n)
        .map(|k| (tau.tau1 * d[k - 1] + tau.tau2 * d[k] + c_t) * off[k - 1])
        .collect();
    let diag = (0..n)
        .map(|k| (tau.tau1 + tau.tau2) * diag[k] * d[k] + c_d * d[k] + c_t * diag[k] + tau.tau0)
        .collect();
    TridiagCoefficients { lower, diag, upper }
}

/// Perline coefficients together with the identifiability of both grids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerlineSolution {
    pub tau: HeunCoefficients,
    pub j1: usize,
    pub j2: usize,
    pub lambda_check: Identifiability,
    pub mu_check: Identifiability,
}

impl PerlineSolution {
    pub fn is_degenerate(&self) -> bool {
        self.lambda_check.is_degenerate() || self.mu_check.is_degenerate()
    }
}

/// `τ₁ = τ₂ = 1`, `τ₄ = −(λ_{J1} + λ_{J1+1})`, `τ₃ = −(μ_{J2} + μ_{J2+1})`,
/// `τ₀ = 0`: the unique symmetric choice (up to scale and shift) that
/// decouples the index ranges `0..=J1` of the e-basis and `0..=J2` of the
/// d-basis.
///
/// Degenerate grids do not abort the solve; they are reported in the flags.
pub fn solve_perline_discrete(pair: &LeonardPair, j1: usize, j2: usize) -> Result<PerlineSolution> {
    let n = pair.degree();
    for (name, j) in [("J1", j1), ("J2", j2)] {
        if j >= n {
            return Err(invalid(name, format!("cutoff {j} must lie in 0..={}", n - 1)));
        }
    }
    let (lam, mu) = (pair.lambda(), pair.mu());
    let tau = HeunCoefficients::new(0.0, 1.0, 1.0, -(mu[j2] + mu[j2 + 1]), -(lam[j1] + lam[j1 + 1]))?;
    Ok(PerlineSolution {
        tau,
        j1,
        j2,
        lambda_check: perline_degeneracy_check(lam)?,
        mu_check: perline_degeneracy_check(mu)?,
    })
}

/// Relative tolerance for the two-endpoint compatibility `φ(β) = φ(α)`.
pub const ENDPOINT_RTOL: f64 = 1e-12;

/// Symmetric coefficients for the differential case: `τ₁ = τ₂ = 1`,
/// `τ₃ = −2φ(α)`. `τ₄` and `τ₀` are not constrained by the boundary
/// conditions and are returned as 0.
///
/// With a second endpoint the condition must hold there too, which needs
/// `φ(β) = φ(α)`.
pub fn solve_perline_continuous(phi_alpha: f64, phi_beta: Option<f64>) -> Result<HeunCoefficients> {
    if let Some(pb) = phi_beta {
        let scale = phi_alpha.abs().max(pb.abs()).max(1.0);
        if (pb - phi_alpha).abs() > ENDPOINT_RTOL * scale {
            return Err(Error::Infeasible(format!(
                "phi(beta) = {pb} differs from phi(alpha) = {phi_alpha}; \
                 no symmetric operator satisfies both boundary conditions"
            )));
        }
    }
    HeunCoefficients::new(0.0, 1.0, 1.0, -2.0 * phi_alpha, 0.0)
}

/// Parameters of the Heun equation
/// `ψ'' + (γ/x + δ/(x−1) + ε/(x−d))ψ' + (αβx − q)/(x(x−1)(x−d)) ψ = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeunOdeParams {
    pub gamma: f64,
    pub delta: f64,
    pub epsilon: f64,
    pub d: f64,
    pub alpha_beta: f64,
    pub q: f64,
}

/// Parameter correspondence for `L` the hypergeometric operator with
/// exponents `ν₁`, `ν₂`, after normalizing `τ₁ + τ₂ = 1`.
pub fn heun_ode_params(nu1: f64, nu2: f64, tau: &HeunCoefficients, lambda: f64) -> Result<HeunOdeParams> {
    let s = tau.tau1 + tau.tau2;
    if s == 0.0 {
        return Err(invalid("tau", "tau1 + tau2 = 0 cannot be normalized"));
    }
    let (tau2, tau3, tau4) = (tau.tau2 / s, tau.tau3 / s, tau.tau4 / s);
    Ok(HeunOdeParams {
        gamma: nu2,
        delta: -nu1 - nu2,
        epsilon: 2.0 * tau2,
        d: -tau4,
        alpha_beta: -tau3 - nu1 * tau2,
        q: lambda - tau2 * nu2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leonard::{make_anti_krawtchouk, make_hahn, make_krawtchouk};

    fn tau(t: [f64; 5]) -> HeunCoefficients {
        HeunCoefficients::new(t[0], t[1], t[2], t[3], t[4]).unwrap()
    }

    #[test]
    fn pure_l_and_pure_z() {
        let p = make_krawtchouk(6, 0.3).unwrap();
        let z = BandedOperator::symmetric_tridiagonal(p.xi(), p.eta()).unwrap();
        let m = assemble_heun_matrix(p.lambda(), &z, &tau([0.0, 0.0, 0.0, 1.0, 0.0])).unwrap();
        assert_eq!(m.to_dense(), Matrix::from_diagonal(p.lambda()));
        let m = assemble_heun_matrix(p.lambda(), &z, &tau([0.0, 0.0, 0.0, 0.0, 1.0])).unwrap();
        assert_eq!(m.to_dense(), z.to_dense());
    }

    #[test]
    fn closed_form_special_cases() {
        let p = make_hahn(8, 0.5, 1.5).unwrap();
        let c = heun_tridiag_coeffs_e(&p, &tau([0.3, 1.0, 1.0, -2.0, 0.7]));
        assert_eq!(c.lower, c.upper);
        let z = heun_tridiag_coeffs_e(&p, &tau([0.0, 0.0, 0.0, 0.0, 1.0]));
        assert_eq!(z.lower, p.xi());
        assert_eq!(z.diag, p.eta());
        let cd = heun_tridiag_coeffs_d(&p, &tau([0.3, 1.0, 1.0, -2.0, 0.7]));
        assert_eq!(cd.lower, cd.upper);
        let l = heun_tridiag_coeffs_d(&p, &tau([0.0, 0.0, 0.0, 1.0, 0.0]));
        assert_eq!(l.lower, p.a());
        assert_eq!(l.diag, p.b());
    }

    #[test]
    fn all_zero_tau_rejected() {
        assert!(HeunCoefficients::new(1.0, 0.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn perline_coefficients() {
        let p = make_krawtchouk(20, 0.3).unwrap();
        let s = solve_perline_discrete(&p, 7, 11).unwrap();
        assert_eq!(s.tau.tau4, -(p.lambda()[7] + p.lambda()[8]));
        assert_eq!(s.tau.tau3, -(p.mu()[11] + p.mu()[12]));
        assert_eq!((s.tau.tau1, s.tau.tau2, s.tau.tau0), (1.0, 1.0, 0.0));
        assert!(!s.is_degenerate());
        assert!(solve_perline_discrete(&p, 20, 3).is_err());
    }

    #[test]
    fn anti_krawtchouk_flags_both_grids() {
        let p = make_anti_krawtchouk(8).unwrap();
        let s = solve_perline_discrete(&p, 3, 5).unwrap();
        assert!(s.lambda_check.is_degenerate() && s.mu_check.is_degenerate());
    }

    #[test]
    fn continuous_solver() {
        assert_eq!(solve_perline_continuous(0.0, None).unwrap().tau3, 0.0);
        // φ(x) = x² on [−T, T]
        let t = 1.7;
        assert!(solve_perline_continuous(t * t, Some((-t) * (-t))).is_ok());
        // φ(x) = x on [α, β]
        assert!(matches!(
            solve_perline_continuous(-1.0, Some(2.0)),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn ode_parameter_map() {
        let half = tau([0.0, 0.5, 0.5, 0.2, -0.4]);
        let p = heun_ode_params(0.3, 0.1, &half, 2.0).unwrap();
        assert_eq!(p.epsilon, 1.0);
        assert_eq!(p.d, 0.4);
        let q = heun_ode_params(0.0, 0.5, &tau([0.0, 0.75, 0.25, 0.0, 1.0]), 0.0).unwrap();
        assert_eq!((q.gamma, q.epsilon), (0.5, 0.5));
        assert!(heun_ode_params(0.0, 0.5, &tau([0.0, 1.0, -1.0, 1.0, 0.0]), 0.0).is_err());
    }

    #[test]
    fn lame_parameters_unreachable_with_symmetric_tau() {
        // Lamé needs γ = δ = ε = 1/2, but τ₁ = τ₂ forces ε = 1.
        for t1 in [0.1, 1.0, 3.0] {
            let p = heun_ode_params(-1.0, 0.5, &tau([0.0, t1, t1, 0.0, 1.0]), 0.0).unwrap();
            assert_eq!(p.epsilon, 1.0);
            assert_ne!(p.epsilon, 0.5);
        }
    }
}
