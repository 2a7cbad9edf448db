//! Band-time limiting for finite Leonard pairs: projectors, restriction
//! operators, the kernel matrix in three independent forms, commutation
//! checks and diagonalization of the global operator through the commuting
//! tridiagonal one.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::heun::{assemble_heun_matrix, assemble_heun_matrix_dual, solve_perline_discrete, HeunCoefficients};
use crate::leonard::{Identifiability, LeonardPair, Recurrence};
use crate::linalg::{
    commutator_residual, min_spectral_gap, spectral_spread, sym_eigen, BandedOperator, Matrix, SymmetricMatrix,
};

/// A commuting operator is accepted for diagonalization only when its
/// relative commutator residual with the target is below this.
pub const COMMUTATION_GATE: f64 = 1e-8;

/// A spectrum counts as simple when its smallest gap exceeds this fraction
/// of its spread.
pub const SIMPLE_SPECTRUM_RTOL: f64 = 1e-8;

/// Orthogonal projection onto the first `cutoff + 1` basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Projector {
    size: usize,
    cutoff: usize,
}

impl Projector {
    pub fn new(size: usize, cutoff: usize) -> Result<Self> {
        if cutoff >= size {
            return Err(invalid("cutoff", format!("cutoff {cutoff} must be below size {size}")));
        }
        Ok(Self { size, cutoff })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn rank(&self) -> usize {
        self.cutoff + 1
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::from_fn(
            self.size,
            self.size,
            |i, j| {
                if i == j && i <= self.cutoff {
                    1.0
                } else {
                    0.0
                }
            },
        )
    }
}

fn check_cutoffs(pair: &LeonardPair, j1: usize, j2: usize) -> Result<()> {
    let n = pair.degree();
    for (name, j) in [("J1", j1), ("J2", j2)] {
        if j > n {
            return Err(invalid(name, format!("cutoff {j} must lie in 0..={n}")));
        }
    }
    Ok(())
}

/// `V₁ = π₁π₂π₁` in the e-basis and `V₂ = π₂π₁π₂` in the d-basis.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictionOperators {
    pub v1: SymmetricMatrix,
    pub v2: SymmetricMatrix,
}

/// Builds both restriction operators from exact projector products,
/// moving `π₂` into the e-basis as `U P₂ Uᵀ` with the orthogonal
/// interbasis matrix `U` (and dually for `π₁` in the d-basis).
pub fn restriction_operators(pair: &LeonardPair, j1: usize, j2: usize) -> Result<RestrictionOperators> {
    check_cutoffs(pair, j1, j2)?;
    let n = pair.dimension();
    let u = pair.interbasis()?;
    let ut = u.transpose();
    let p1 = Projector::new(n, j1)?.matrix();
    let p2 = Projector::new(n, j2)?.matrix();
    let pi2_e = &(&u * &p2) * &ut;
    let pi1_d = &(&ut * &p1) * &u;
    let v1 = &(&p1 * &pi2_e) * &p1;
    let v2 = &(&p2 * &pi1_d) * &p2;
    Ok(RestrictionOperators {
        v1: SymmetricMatrix::from_dense(&v1, 1e-12)?,
        v2: SymmetricMatrix::from_dense(&v2, 1e-12)?,
    })
}

/// Christoffel weights `w_s = 1 / Σ_k φ_k(x_s)²` and the values
/// `φ_0..φ_{up_to}` at each grid point, all from the recurrence.
fn recurrence_table(rec: &Recurrence, grid: &[f64], up_to: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = rec.size() - 1;
    let mut weights = Vec::with_capacity(grid.len());
    let mut values = Vec::with_capacity(grid.len());
    for &x in grid {
        let all = rec.eval(x, n)?;
        weights.push(1.0 / all.iter().map(|v| v * v).sum::<f64>());
        values.push(all[..=up_to].to_vec());
    }
    Ok((weights, values))
}

/// `K_{tn} = Σ_{s≤J2} √(w_n w_t) φ_s(λ_n) φ_s(λ_t)` for `t, n ≤ J1`.
pub fn kernel_matrix_sum(pair: &LeonardPair, j1: usize, j2: usize) -> Result<SymmetricMatrix> {
    check_cutoffs(pair, j1, j2)?;
    let (w, phi) = recurrence_table(&pair.l_recurrence(), &pair.lambda()[..=j1], j2)?;
    SymmetricMatrix::from_lower_fn(j1 + 1, |t, n| {
        let s: f64 = phi[t].iter().zip(&phi[n]).map(|(a, b)| a * b).sum();
        (w[t] * w[n]).sqrt() * s
    })
}

/// Dual form `K_{tn} = Σ_{s≤J2} w̃_s χ_n(μ_s) χ_t(μ_s)`.
pub fn kernel_matrix_dual(pair: &LeonardPair, j1: usize, j2: usize) -> Result<SymmetricMatrix> {
    check_cutoffs(pair, j1, j2)?;
    let (w, chi) = recurrence_table(&pair.z_recurrence(), &pair.mu()[..=j2], j1)?;
    SymmetricMatrix::from_lower_fn(j1 + 1, |t, n| (0..=j2).map(|s| w[s] * chi[s][n] * chi[s][t]).sum())
}

/// Christoffel–Darboux form: off-diagonal entries from the CD quotient and
/// diagonal entries from its confluent limit, with derivatives from the
/// differentiated recurrence.
///
/// The combination `a_{J2+1}φ_{J2+1}` is formed directly from the
/// recurrence, so `J2 = N` needs no coefficient beyond the pair.
pub fn kernel_matrix_cd(pair: &LeonardPair, j1: usize, j2: usize) -> Result<SymmetricMatrix> {
    check_cutoffs(pair, j1, j2)?;
    let rec = pair.l_recurrence();
    let (a, b) = (rec.a(), rec.b());
    let grid = &pair.lambda()[..=j1];
    let (w, _) = recurrence_table(&rec, grid, 0)?;
    // (φ_{J2}, ψ = a_{J2+1}φ_{J2+1}, φ'_{J2}, ψ') at each grid point.
    let mut cols = Vec::with_capacity(grid.len());
    for &x in grid {
        let (p, d) = rec.eval_with_derivative(x, j2)?;
        let (pm, dm) = if j2 == 0 { (0.0, 0.0) } else { (p[j2 - 1], d[j2 - 1]) };
        let aj = if j2 == 0 { 0.0 } else { a[j2 - 1] };
        let psi = (x - b[j2]) * p[j2] - aj * pm;
        let dpsi = p[j2] + (x - b[j2]) * d[j2] - aj * dm;
        cols.push((p[j2], psi, d[j2], dpsi));
    }
    SymmetricMatrix::from_lower_fn(j1 + 1, |t, n| {
        let (pt, qt, dpt, dqt) = cols[t];
        let (pn, qn, ..) = cols[n];
        let core = if t == n {
            dqt * pt - dpt * qt
        } else {
            (qt * pn - pt * qn) / (grid[t] - grid[n])
        };
        (w[t] * w[n]).sqrt() * core
    })
}

/// Commutation of a tridiagonal operator with the projector of cutoff `J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectorCommutation {
    /// `max(|M_{J+1,J}|, |M_{J,J+1}|)` over the largest off-diagonal entry.
    pub band_residual: f64,
    /// Relative dense commutator residual `‖[M, π]‖ / (‖M‖‖π‖)`.
    pub dense_residual: f64,
}

pub fn verify_projector_commutation(m: &BandedOperator, j: usize) -> Result<ProjectorCommutation> {
    let p = Projector::new(m.size(), j)?;
    let dense_residual = commutator_residual(&m.to_dense(), &p.matrix())?;
    let band_residual = if j + 1 == m.size() {
        0.0
    } else {
        let coupling = m.get(j + 1, j).abs().max(m.get(j, j + 1).abs());
        let scale = m.max_off_diagonal();
        if scale == 0.0 {
            0.0
        } else {
            coupling / scale
        }
    };
    Ok(ProjectorCommutation {
        band_residual,
        dense_residual,
    })
}

/// Eigenpairs of a global operator obtained from a commuting local one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutingDiagonalization {
    /// Eigenvalues of the local operator, ascending.
    pub local_values: Vec<f64>,
    /// `v_iᵀ K v_i` for the local eigenvectors, aligned with `local_values`.
    pub rayleigh: Vec<f64>,
    /// Eigenvalues of `K` from a direct eigensolve, ascending.
    pub direct: Vec<f64>,
    /// Largest difference between sorted Rayleigh and direct values.
    pub multiset_deviation: f64,
    /// `max_i ‖K v_i − ρ_i v_i‖₂`.
    pub max_eigen_residual: f64,
    pub commutator_residual: f64,
    pub min_gap: Option<f64>,
    pub spread: f64,
}

/// Fails with [`Error::DegenerateSpectrum`] unless the smallest gap exceeds
/// `SIMPLE_SPECTRUM_RTOL` times the spread.
pub fn require_simple_spectrum(values: &[f64]) -> Result<()> {
    if let Some(gap) = min_spectral_gap(values) {
        let threshold = SIMPLE_SPECTRUM_RTOL * spectral_spread(values);
        if gap <= threshold {
            return Err(Error::DegenerateSpectrum {
                min_gap: gap,
                threshold,
            });
        }
    }
    Ok(())
}

/// Diagonalizes `K` with the eigenvectors of a commuting operator with
/// simple spectrum and compares the resulting Rayleigh quotients with a
/// direct eigensolve of `K`.
///
/// Refuses when the two do not commute or the local spectrum is not simple:
/// a repeated eigenvalue leaves the eigenvectors of `K` undetermined.
pub fn diagonalize_via_commuting(k: &SymmetricMatrix, mres: &BandedOperator) -> Result<CommutingDiagonalization> {
    if k.size() != mres.size() {
        return Err(Error::SizeMismatch {
            left: k.size(),
            right: mres.size(),
        });
    }
    let kd = k.to_dense();
    let comm = commutator_residual(&mres.to_dense(), &kd)?;
    if comm >= COMMUTATION_GATE {
        return Err(Error::NotCommuting {
            residual: comm,
            tolerance: COMMUTATION_GATE,
        });
    }
    let local = sym_eigen(&SymmetricMatrix::from_dense(&mres.to_dense(), 1e-12)?)?;
    require_simple_spectrum(local.values())?;
    let mut rayleigh = Vec::with_capacity(local.len());
    let mut max_eigen_residual = 0.0f64;
    for i in 0..local.len() {
        let v = local.vector(i);
        let kv = kd.mul_vec(&v);
        let rho: f64 = v.iter().zip(&kv).map(|(a, b)| a * b).sum();
        let res = kv
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - rho * y).powi(2))
            .sum::<f64>()
            .sqrt();
        max_eigen_residual = max_eigen_residual.max(res);
        rayleigh.push(rho);
    }
    let direct = sym_eigen(k)?.values().to_vec();
    let mut sorted = rayleigh.clone();
    sorted.sort_by(f64::total_cmp);
    let multiset_deviation = sorted
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CommutingDiagonalization {
        min_gap: min_spectral_gap(local.values()),
        spread: spectral_spread(local.values()),
        local_values: local.values().to_vec(),
        rayleigh,
        direct,
        multiset_deviation,
        max_eigen_residual,
        commutator_residual: comm,
    })
}

/// Everything computed for one `(pair, J1, J2)` configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitingReport {
    pub j1: usize,
    pub j2: usize,
    pub tau: HeunCoefficients,
    pub lambda_check: Identifiability,
    pub mu_check: Identifiability,
    /// `‖[M, π₁]‖` relative, in the e-basis.
    pub m_pi1: ProjectorCommutation,
    /// `‖[M, π₂]‖` relative, in the d-basis.
    pub m_pi2: ProjectorCommutation,
    pub m_v1: f64,
    pub m_v2: f64,
    /// Largest entrywise difference among the three kernel forms.
    pub kernel_cross_deviation: f64,
    /// Largest difference between the kernel sum form and the leading block
    /// of `V₁`.
    pub kernel_vs_v1: f64,
    /// Difference between the nonzero spectra of `V₁` and `V₂`.
    pub v1_v2_spectral_deviation: f64,
    /// Restricted (leading `J1 + 1` block) Perline operator.
    pub restricted_values: Vec<f64>,
    pub restricted_min_gap: Option<f64>,
    pub restricted_spread: f64,
    /// Eigenvalues of the kernel matrix (the concentration eigenvalues).
    pub concentration: Vec<f64>,
    pub diagonalization: Option<CommutingDiagonalization>,
    /// Why `diagonalization` is absent.
    pub refusal: Option<String>,
}

impl LimitingReport {
    pub fn restricted_gap_ratio(&self) -> Option<f64> {
        let gap = self.restricted_min_gap?;
        (self.restricted_spread > 0.0).then(|| gap / self.restricted_spread)
    }
}

fn max_entry_diff(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
    (&a.to_dense() - &b.to_dense()).max_abs()
}

/// Full discrete pipeline for one configuration.
pub fn analyze_discrete(pair: &LeonardPair, j1: usize, j2: usize) -> Result<LimitingReport> {
    let perline = solve_perline_discrete(pair, j1, j2)?;
    let tau = perline.tau;
    let z_e = BandedOperator::symmetric_tridiagonal(pair.xi(), pair.eta())?;
    let l_d = BandedOperator::symmetric_tridiagonal(pair.a(), pair.b())?;
    let m_e = assemble_heun_matrix(pair.lambda(), &z_e, &tau)?;
    let m_d = assemble_heun_matrix_dual(&l_d, pair.mu(), &tau)?;
    let m_pi1 = verify_projector_commutation(&m_e, j1)?;
    let m_pi2 = verify_projector_commutation(&m_d, j2)?;

    let v = restriction_operators(pair, j1, j2)?;
    let m_v1 = commutator_residual(&m_e.to_dense(), &v.v1.to_dense())?;
    let m_v2 = commutator_residual(&m_d.to_dense(), &v.v2.to_dense())?;

    let k_sum = kernel_matrix_sum(pair, j1, j2)?;
    let k_dual = kernel_matrix_dual(pair, j1, j2)?;
    let k_cd = kernel_matrix_cd(pair, j1, j2)?;
    let kernel_cross_deviation = max_entry_diff(&k_sum, &k_dual)
        .max(max_entry_diff(&k_sum, &k_cd))
        .max(max_entry_diff(&k_dual, &k_cd));
    let k = v.v1.leading_block(j1 + 1)?;
    let kernel_vs_v1 = max_entry_diff(&k_sum, &k);

    let mut s1 = sym_eigen(&v.v1)?.values().to_vec();
    let mut s2 = sym_eigen(&v.v2)?.values().to_vec();
    s1.reverse();
    s2.reverse();
    let rank = j1.min(j2) + 1;
    let v1_v2_spectral_deviation = s1[..rank]
        .iter()
        .zip(&s2[..rank])
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);

    let m_res = m_e.leading_block(j1 + 1)?;
    let restricted = sym_eigen(&SymmetricMatrix::from_dense(&m_res.to_dense(), 1e-12)?)?;
    let concentration = sym_eigen(&k)?.values().to_vec();
    let (diagonalization, refusal) = match diagonalize_via_commuting(&k, &m_res) {
        Ok(d) => (Some(d), None),
        Err(e @ (Error::DegenerateSpectrum { .. } | Error::NotCommuting { .. })) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(LimitingReport {
        j1,
        j2,
        tau,
        lambda_check: perline.lambda_check,
        mu_check: perline.mu_check,
        m_pi1,
        m_pi2,
        m_v1,
        m_v2,
        kernel_cross_deviation,
        kernel_vs_v1,
        v1_v2_spectral_deviation,
        restricted_min_gap: min_spectral_gap(restricted.values()),
        restricted_spread: spectral_spread(restricted.values()),
        restricted_values: restricted.values().to_vec(),
        concentration,
        diagonalization,
        refusal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leonard::make_krawtchouk;

    #[test]
    fn projector_is_idempotent() {
        let p = Projector::new(6, 2).unwrap().matrix();
        assert_eq!(&p * &p, p);
        assert!(Projector::new(3, 3).is_err());
    }

    #[test]
    fn diagonal_operator_commutes_with_every_projector() {
        let m = BandedOperator::diagonal_matrix(&[3.0, 1.0, 4.0, 1.5]).unwrap();
        for j in 0..4 {
            let r = verify_projector_commutation(&m, j).unwrap();
            assert_eq!(r.band_residual, 0.0);
            assert_eq!(r.dense_residual, 0.0);
        }
    }

    #[test]
    fn identity_kernel_has_unit_rayleigh_values() {
        let k = SymmetricMatrix::identity(4).unwrap();
        let m = BandedOperator::symmetric_tridiagonal(&[1.0, 1.0, 1.0], &[0.0, 1.0, 2.0, 3.0]).unwrap();
        let d = diagonalize_via_commuting(&k, &m).unwrap();
        assert!(d.rayleigh.iter().all(|r| (r - 1.0).abs() < 1e-14));
    }

    #[test]
    fn degenerate_local_operator_refused() {
        let k = SymmetricMatrix::identity(3).unwrap();
        let m = BandedOperator::diagonal_matrix(&[1.0, 1.0, 2.0]).unwrap();
        let err = diagonalize_via_commuting(&k, &m).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpectrum { .. }));
        assert!(err.to_string().contains("fails to have a simple spectrum"));
    }

    #[test]
    fn full_band_cutoff_gives_projector() {
        let p = make_krawtchouk(6, 0.3).unwrap();
        let v = restriction_operators(&p, 2, 6).unwrap();
        let want = Projector::new(7, 2).unwrap().matrix();
        assert!((&v.v1.to_dense() - &want).max_abs() < 1e-12);
        let v = restriction_operators(&p, 6, 6).unwrap();
        assert!((&v.v1.to_dense() - &Matrix::identity(7)).max_abs() < 1e-12);
    }
}
