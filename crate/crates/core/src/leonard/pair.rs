use serde::{Deserialize, Serialize};

use super::Recurrence;
use crate::error::{Error, Result};
use crate::linalg::{min_spectral_gap, sym_eigen, Matrix};

/// Relative tolerance for matching the spectrum of a tridiagonal
/// representation against the declared grid.
const SPECTRUM_MATCH_RTOL: f64 = 1e-10;

/// Family a pair was built from, kept for reporting.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    Krawtchouk { p: f64 },
    Hahn { alpha: f64, beta: f64 },
    AntiKrawtchouk,
    Custom,
}

/// Finite Leonard pair `(L, Z)` in its two canonical bases.
///
/// In the e-basis `L = diag(λ)` and `Z = tridiag(ξ, η)`; in the d-basis
/// `Z = diag(μ)` and `L = tridiag(a, b)`. Grids are kept in the family's
/// index order, not sorted, because the duality between the two bases is
/// ordering-sensitive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeonardPair {
    family: Family,
    lambda: Vec<f64>,
    xi: Vec<f64>,
    eta: Vec<f64>,
    mu: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LeonardPair {
    /// Validates irreducibility, distinct grids and that each tridiagonal
    /// representation has the other basis' grid as its spectrum.
    pub fn new(
        family: Family,
        lambda: Vec<f64>,
        xi: Vec<f64>,
        eta: Vec<f64>,
        mu: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        let n = lambda.len();
        if n == 0 || [mu.len(), eta.len(), b.len()].iter().any(|&k| k != n) {
            return Err(Error::InvalidPair(format!(
                "grid lengths disagree: lambda {n}, mu {}, eta {}, b {}",
                mu.len(),
                eta.len(),
                b.len()
            )));
        }
        let l_rec =
            Recurrence::new(a.clone(), b.clone()).map_err(|e| Error::InvalidPair(format!("L in the d-basis: {e}")))?;
        let z_rec = Recurrence::new(xi.clone(), eta.clone())
            .map_err(|e| Error::InvalidPair(format!("Z in the e-basis: {e}")))?;
        for (name, grid) in [("lambda", &lambda), ("mu", &mu)] {
            if grid.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidPair(format!("{name} has non-finite entries")));
            }
            if min_spectral_gap(grid).is_some_and(|g| g == 0.0) {
                return Err(Error::InvalidPair(format!("{name} has repeated values")));
            }
        }
        check_spectrum(&l_rec, &lambda, "tridiag(a, b)", "lambda")?;
        check_spectrum(&z_rec, &mu, "tridiag(xi, eta)", "mu")?;
        Ok(Self {
            family,
            lambda,
            xi,
            eta,
            mu,
            a,
            b,
        })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Dimension `N + 1`.
    pub fn dimension(&self) -> usize {
        self.lambda.len()
    }

    /// `N`, the largest admissible cutoff index.
    pub fn degree(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Recurrence of the polynomials `φ_n` (L in the d-basis).
    pub fn l_recurrence(&self) -> Recurrence {
        Recurrence::new(self.a.clone(), self.b.clone()).expect("validated")
    }

    /// Recurrence of the dual polynomials `χ_n` (Z in the e-basis).
    pub fn z_recurrence(&self) -> Recurrence {
        Recurrence::new(self.xi.clone(), self.eta.clone()).expect("validated")
    }

    pub fn l_e(&self) -> Matrix {
        Matrix::from_diagonal(&self.lambda)
    }

    pub fn z_e(&self) -> Matrix {
        Matrix::tridiagonal(&self.xi, &self.eta)
    }

    pub fn l_d(&self) -> Matrix {
        Matrix::tridiagonal(&self.a, &self.b)
    }

    pub fn z_d(&self) -> Matrix {
        Matrix::from_diagonal(&self.mu)
    }

    /// Orthogonal change of basis `U[s][n] = √w_s φ_n(λ_s)`: row `s` holds
    /// the d-coordinates of `e_s`, so e-coordinates are `U · d-coordinates`.
    pub fn interbasis(&self) -> Result<Matrix> {
        gauged_eigenvectors(&self.l_recurrence(), &self.lambda)
    }

    /// Dual change of basis `Ũ[n][s] = √w̃_n χ_s(μ_n)`.
    pub fn dual_interbasis(&self) -> Result<Matrix> {
        gauged_eigenvectors(&self.z_recurrence(), &self.mu)
    }

    /// Weights `w_s` of the orthogonality of `φ_n` on the grid `λ_s`, in
    /// grid order.
    pub fn weights(&self) -> Result<Vec<f64>> {
        let u = self.interbasis()?;
        Ok((0..self.dimension()).map(|s| u[(s, 0)].powi(2)).collect())
    }

    /// Weights `w̃_n` of the dual polynomials on the grid `μ_n`.
    pub fn dual_weights(&self) -> Result<Vec<f64>> {
        let u = self.dual_interbasis()?;
        Ok((0..self.dimension()).map(|n| u[(n, 0)].powi(2)).collect())
    }
}

fn check_spectrum(rec: &Recurrence, grid: &[f64], what: &str, name: &str) -> Result<()> {
    let spec = sym_eigen(&rec.jacobi_matrix())?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let scale = sorted.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let worst = spec
        .values()
        .iter()
        .zip(&sorted)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if worst > SPECTRUM_MATCH_RTOL * scale {
        return Err(Error::InvalidPair(format!(
            "eigenvalues of {what} differ from {name} by {worst:e}"
        )));
    }
    Ok(())
}

/// Eigenvectors of the Jacobi matrix, one row per grid point in grid
/// order, each signed so that it equals `√w_s φ_n(λ_s)`.
///
/// The sign is fixed at the component of largest magnitude, where the
/// forward recurrence gives a reliable sign for `φ_k(λ_s)`; small leading
/// components (tiny weights) are never used for the gauge.
fn gauged_eigenvectors(rec: &Recurrence, grid: &[f64]) -> Result<Matrix> {
    let n = grid.len();
    let spec = sym_eigen(&rec.jacobi_matrix())?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| grid[i].total_cmp(&grid[j]));
    // order[k] is the grid index of the k-th smallest eigenvalue.
    let mut u = Matrix::zeros(n, n);
    for (k, &s) in order.iter().enumerate() {
        let v = spec.vector(k);
        let pivot = (0..n)
            .max_by(|&i, &j| v[i].abs().total_cmp(&v[j].abs()))
            .expect("nonempty");
        let phi = rec.eval(grid[s], pivot)?;
        let sign = if (phi[pivot] >= 0.0) == (v[pivot] >= 0.0) {
            1.0
        } else {
            -1.0
        };
        for (c, x) in v.iter().enumerate() {
            u[(s, c)] = sign * x;
        }
    }
    Ok(u)
}

/// `max_{n,s} |√w_s φ_n(λ_s) − √w̃_n χ_s(μ_n)|`.
pub fn duality_residual(pair: &LeonardPair) -> Result<f64> {
    let u = pair.interbasis()?;
    let ud = pair.dual_interbasis()?;
    Ok((&u - &ud.transpose()).max_abs())
}
