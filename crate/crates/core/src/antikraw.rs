//! Anti-Krawtchouk representation of the anti-spin algebra and the
//! commuting operators built from it: the bilinear Perline form (whose
//! restricted spectrum is degenerate) and two pentadiagonal forms with
//! simple restricted spectra.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::leonard::{anti_krawtchouk_diag, anti_krawtchouk_grid, anti_krawtchouk_offdiag};
use crate::limiting::require_simple_spectrum;
use crate::linalg::{
    anticommutator, commutator_residual, least_squares, min_spectral_gap, solve_dense, spectral_spread, sym_eigen,
    Matrix, SymmetricMatrix,
};

/// Representation of `{L_i, L_j} = L_k` on `N + 1` dimensions, `N` even.
///
/// In the e-basis `L1` is tridiagonal with positive off-diagonals and
/// `L2 = diag(x)`; by self-duality the d-basis swaps the two matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct AntiSpinRep {
    n: usize,
    grid: Vec<f64>,
    off: Vec<f64>,
    diag: Vec<f64>,
}

pub fn make_antispin(n: usize) -> Result<AntiSpinRep> {
    if !n.is_multiple_of(2) {
        return Err(invalid("N", format!("N = {n} must be even")));
    }
    Ok(AntiSpinRep {
        n,
        grid: anti_krawtchouk_grid(n),
        off: anti_krawtchouk_offdiag(n),
        diag: anti_krawtchouk_diag(n),
    })
}

impl AntiSpinRep {
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dimension(&self) -> usize {
        self.n + 1
    }

    /// `x_n = (−1)ⁿ(n + 1/2)`.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Positive off-diagonal of `L1`.
    pub fn offdiag(&self) -> &[f64] {
        &self.off
    }

    pub fn l1(&self) -> Matrix {
        Matrix::tridiagonal(&self.off, &self.diag)
    }

    pub fn l2(&self) -> Matrix {
        Matrix::from_diagonal(&self.grid)
    }

    pub fn l3(&self) -> Matrix {
        anticommutator(&self.l1(), &self.l2()).expect("square")
    }

    /// `(N + 1/2)(N + 3/2)`.
    pub fn casimir_value(&self) -> f64 {
        let n = self.n as f64;
        (n + 0.5) * (n + 1.5)
    }

    /// `‖L1² + L2² + L3² − c I‖_F / c` with `c` the Casimir value.
    pub fn casimir_residual(&self) -> f64 {
        let (l1, l2, l3) = (self.l1(), self.l2(), self.l3());
        let q = &(&(&l1 * &l1) + &(&l2 * &l2)) + &(&l3 * &l3);
        let c = self.casimir_value();
        (&q - &Matrix::identity(self.dimension()).scale(c)).frobenius_norm() / c
    }

    /// Relative residuals of `{L1,L2} = L3`, `{L2,L3} = L1`, `{L3,L1} = L2`.
    pub fn anticommutator_residuals(&self) -> [f64; 3] {
        let (l1, l2, l3) = (self.l1(), self.l2(), self.l3());
        let rel = |a: &Matrix, b: &Matrix, want: &Matrix| {
            let d = &anticommutator(a, b).expect("square") - want;
            d.frobenius_norm() / want.frobenius_norm().max(f64::MIN_POSITIVE)
        };
        [rel(&l1, &l2, &l3), rel(&l2, &l3, &l1), rel(&l3, &l1, &l2)]
    }

    /// Orthogonal matrix whose column `k` is the eigenvector of `L1` for
    /// `x_k`; conjugating an e-basis operator by it gives the d-basis one
    /// up to a diagonal sign change.
    pub fn eigenbasis(&self) -> Result<Matrix> {
        let spec = sym_eigen(&SymmetricMatrix::tridiagonal(&self.off, &self.diag)?)?;
        let mut order: Vec<usize> = (0..self.dimension()).collect();
        order.sort_by(|&i, &j| self.grid[i].total_cmp(&self.grid[j]));
        let mut s = Matrix::zeros(self.dimension(), self.dimension());
        for (k, &col) in order.iter().enumerate() {
            for (r, v) in spec.vector(k).into_iter().enumerate() {
                s[(r, col)] = v;
            }
        }
        Ok(s)
    }
}

/// Coefficients of the pentadiagonal ansatz
/// `{L1²,L2²} + α₁{L1²,L2} + α₂{L2²,L1} + α₃L1² + α₄L2² + α₅L1 + α₆L2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentaCoefficients {
    pub alpha: [f64; 6],
    pub kappa1: f64,
    pub kappa2: f64,
}

/// `2k² + 4k + 5/2`.
pub fn kappa(cutoff: usize) -> f64 {
    let k = cutoff as f64;
    2.0 * k * k + 4.0 * k + 2.5
}

fn check_penta_cutoffs(n: usize, n1: usize, n2: usize) -> Result<()> {
    for (name, c) in [("N1", n1), ("N2", n2)] {
        if c < 1 || c + 2 > n {
            return Err(invalid(
                name,
                format!("cutoff {c} must lie in 1..={}", n.saturating_sub(2)),
            ));
        }
    }
    Ok(())
}

/// The six linear conditions making the couplings across both cutoffs
/// vanish; each row is `(coefficients of α₁..α₆, right-hand side)`.
fn condition_rows(x: &[f64], n1: usize, n2: usize) -> [([f64; 6], f64); 6] {
    let sq = |i: usize, j: usize| x[i] * x[i] + x[j] * x[j];
    let mut rows = [([0.0; 6], 0.0); 6];
    rows[0] = ([x[n1] + x[n1 + 2], 0.0, 1.0, 0.0, 0.0, 0.0], -sq(n1, n1 + 2));
    rows[1] = ([x[n1 - 1] + x[n1 + 1], 0.0, 1.0, 0.0, 0.0, 0.0], -sq(n1 - 1, n1 + 1));
    rows[2] = ([0.0, sq(n1, n1 + 1), 0.0, 0.0, 1.0, 0.0], 0.0);
    rows[3] = ([0.0, x[n2] + x[n2 + 2], 0.0, 1.0, 0.0, 0.0], -sq(n2, n2 + 2));
    rows[4] = ([0.0, x[n2 - 1] + x[n2 + 1], 0.0, 1.0, 0.0, 0.0], -sq(n2 - 1, n2 + 1));
    rows[5] = ([sq(n2, n2 + 1), 0.0, 0.0, 0.0, 0.0, 1.0], 0.0);
    rows
}

/// Solves the six cutoff conditions for `α` with a dense solver.
pub fn solve_penta_coeffs(rep: &AntiSpinRep, n1: usize, n2: usize) -> Result<PentaCoefficients> {
    check_penta_cutoffs(rep.n, n1, n2)?;
    let rows = condition_rows(&rep.grid, n1, n2);
    let a = Matrix::from_rows(&rows.iter().map(|r| r.0.to_vec()).collect::<Vec<_>>())?;
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let sol = solve_dense(&a, &rhs)?;
    let mut alpha = [0.0; 6];
    alpha.copy_from_slice(&sol);
    Ok(PentaCoefficients {
        alpha,
        kappa1: kappa(n1),
        kappa2: kappa(n2),
    })
}

/// Residuals of the six cutoff conditions, each relative to the largest
/// term it contains.
pub fn condition_residuals(rep: &AntiSpinRep, n1: usize, n2: usize, coeffs: &PentaCoefficients) -> Result<[f64; 6]> {
    check_penta_cutoffs(rep.n, n1, n2)?;
    let rows = condition_rows(&rep.grid, n1, n2);
    let mut out = [0.0; 6];
    for (o, (row, rhs)) in out.iter_mut().zip(rows) {
        let terms: Vec<f64> = row.iter().zip(&coeffs.alpha).map(|(r, a)| r * a).collect();
        let scale = terms.iter().fold(rhs.abs(), |m, t| m.max(t.abs())).max(1.0);
        *o = (terms.iter().sum::<f64>() - rhs).abs() / scale;
    }
    Ok(out)
}

/// Evaluates the pentadiagonal ansatz for the given pair of matrices; pass
/// `(L1, L2)` for the e-basis and `(L2_d, L1_d)` roles swapped for the
/// d-basis.
pub fn penta_operator(l1: &Matrix, l2: &Matrix, coeffs: &PentaCoefficients) -> Result<Matrix> {
    let [a1, a2, a3, a4, a5, a6] = coeffs.alpha;
    let l1s = l1.try_mul(l1)?;
    let l2s = l2.try_mul(l2)?;
    let mut m = anticommutator(&l1s, &l2s)?;
    for (c, t) in [
        (a1, anticommutator(&l1s, l2)?),
        (a2, anticommutator(&l2s, l1)?),
        (a3, l1s.clone()),
        (a4, l2s.clone()),
        (a5, l1.clone()),
        (a6, l2.clone()),
    ] {
        m = &m + &t.scale(c);
    }
    Ok(m)
}

/// Pentadiagonal ansatz assembled in the e-basis.
pub fn assemble_penta_direct(rep: &AntiSpinRep, coeffs: &PentaCoefficients) -> Result<Matrix> {
    penta_operator(&rep.l1(), &rep.l2(), coeffs)
}

/// Closed-form outer bands: `g[k] = G_{k+2}` sits at `(k+2, k)` and
/// `f[k] = F_{k+2}` at `(k+2, k+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentaBands {
    pub g: Vec<f64>,
    pub f: Vec<f64>,
}

pub fn penta_band_coeffs(rep: &AntiSpinRep, coeffs: &PentaCoefficients) -> PentaBands {
    let [a1, a2, a3, _, a5, _] = coeffs.alpha;
    let (x, a) = (&rep.grid, &rep.off);
    let mut g = Vec::new();
    let mut f = Vec::new();
    for n in 2..=rep.n {
        g.push(a[n - 1] * a[n - 2] * (x[n] * x[n] + x[n - 2] * x[n - 2] + a1 * (x[n] + x[n - 2]) + a3));
        f.push(a[n - 1] * (a2 * (x[n] * x[n] + x[n - 1] * x[n - 1]) + a5));
    }
    PentaBands { g, f }
}

/// Largest difference between the closed-form bands and the assembled
/// matrix, relative to the largest entry of the matrix.
pub fn band_coeff_deviation(rep: &AntiSpinRep, coeffs: &PentaCoefficients) -> Result<f64> {
    let m = assemble_penta_direct(rep, coeffs)?;
    let bands = penta_band_coeffs(rep, coeffs);
    let mut worst = 0.0f64;
    for (k, (g, f)) in bands.g.iter().zip(&bands.f).enumerate() {
        worst = worst.max((m[(k + 2, k)] - g).abs()).max((m[(k + 2, k + 1)] - f).abs());
    }
    Ok(worst / m.max_abs().max(f64::MIN_POSITIVE))
}

/// The alternative pentadiagonal operator with closed-form coefficients.
///
/// The `L2²` coefficient carries a minus sign: with a plus sign the
/// operator still commutes with `π_{N1}` in the e-basis but fails in the
/// d-basis.
pub fn alternative_operator(l1: &Matrix, l2: &Matrix, n1: usize, n2: usize) -> Result<Matrix> {
    let s1 = if n1.is_multiple_of(2) { 1.0 } else { -1.0 };
    let s2 = if n2.is_multiple_of(2) { 1.0 } else { -1.0 };
    let (k1, k2) = (n1 as f64, n2 as f64);
    let c2 = (2.0 * k2 + 1.0) * (2.0 * k2 + 3.0) / 2.0;
    let c1 = (4.0 * k1 * k1 + 8.0 * k1 - 1.0) / 2.0;
    let l1s = l1.try_mul(l1)?;
    let l2s = l2.try_mul(l2)?;
    let mut m = l2.try_mul(&l1s)?.try_mul(l2)?.scale(2.0);
    for (c, t) in [
        (-s1, anticommutator(l2, &l1s)?),
        (-s2, anticommutator(&l2s, l1)?),
        (-c2, l2s.clone()),
        (s1 * (c2 + 1.0), l2.clone()),
        (-c1, l1s.clone()),
        (s2 * (c1 + 3.0), l1.clone()),
    ] {
        m = &m + &t.scale(c);
    }
    Ok(m)
}

pub fn alternative_m(rep: &AntiSpinRep, n1: usize, n2: usize) -> Result<Matrix> {
    check_penta_cutoffs(rep.n, n1, n2)?;
    alternative_operator(&rep.l1(), &rep.l2(), n1, n2)
}

/// Bilinear Perline operator `{L2, L1} + τ₃L2 + τ₄L1` with
/// `τ₄ = −(x_{J1} + x_{J1+1})` and `τ₃ = −(x_{J2} + x_{J2+1})`.
pub fn bilinear_operator(l1: &Matrix, l2: &Matrix, tau3: f64, tau4: f64) -> Result<Matrix> {
    let m = anticommutator(l2, l1)?;
    Ok(&(&m + &l2.scale(tau3)) + &l1.scale(tau4))
}

/// `(τ₃, τ₄)` of the bilinear operator for cutoffs `j1, j2 < N`.
pub fn bilinear_tau(rep: &AntiSpinRep, j1: usize, j2: usize) -> Result<(f64, f64)> {
    for (name, j) in [("J1", j1), ("J2", j2)] {
        if j >= rep.n {
            return Err(invalid(name, format!("cutoff {j} must be below N = {}", rep.n)));
        }
    }
    let x = &rep.grid;
    Ok((-(x[j2] + x[j2 + 1]), -(x[j1] + x[j1 + 1])))
}

/// Which commuting operator to build on the representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ansatz {
    Bilinear,
    Pentadiagonal,
    Alternative,
}

/// An operator in both bases; the d-basis form swaps the roles of `L1`
/// and `L2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzOperator {
    pub ansatz: Ansatz,
    pub e: Matrix,
    pub d: Matrix,
    pub coefficients: Option<PentaCoefficients>,
}

pub fn build_operator(rep: &AntiSpinRep, ansatz: Ansatz, n1: usize, n2: usize) -> Result<AnsatzOperator> {
    let (l1, l2) = (rep.l1(), rep.l2());
    let (e, d, coefficients) = match ansatz {
        Ansatz::Bilinear => {
            let (t3, t4) = bilinear_tau(rep, n1, n2)?;
            (
                bilinear_operator(&l1, &l2, t3, t4)?,
                bilinear_operator(&l2, &l1, t4, t3)?,
                None,
            )
        }
        Ansatz::Pentadiagonal => {
            let c = solve_penta_coeffs(rep, n1, n2)?;
            (penta_operator(&l1, &l2, &c)?, penta_operator(&l2, &l1, &c)?, Some(c))
        }
        Ansatz::Alternative => {
            check_penta_cutoffs(rep.n, n1, n2)?;
            (
                alternative_operator(&l1, &l2, n1, n2)?,
                alternative_operator(&l2, &l1, n1, n2)?,
                None,
            )
        }
    };
    Ok(AnsatzOperator {
        ansatz,
        e,
        d,
        coefficients,
    })
}

/// Commutation and spectral checks of a commuting operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PentaReport {
    pub n1: usize,
    pub n2: usize,
    /// `[M, π_{N1}]` in the e-basis.
    pub comm_e: f64,
    /// `[M, π_{N2}]` in the d-basis built from swapped generators.
    pub comm_d: f64,
    /// `[SᵀMS, π_{N2}]` with `S` the eigenvectors of `L1`.
    pub comm_d_conjugated: f64,
    /// Largest entry outside the pentadiagonal band, relative.
    pub outside_band: f64,
    pub asymmetry: f64,
    pub restricted_e: Vec<f64>,
    pub restricted_d: Vec<f64>,
    pub gap_ratio_e: Option<f64>,
    pub gap_ratio_d: Option<f64>,
    pub simple: bool,
    /// Degeneracy diagnostic when a restricted spectrum is not simple.
    pub refusal: Option<String>,
}

fn projector(size: usize, cutoff: usize) -> Matrix {
    Matrix::from_fn(size, size, |i, j| if i == j && i <= cutoff { 1.0 } else { 0.0 })
}

fn gap_ratio(values: &[f64]) -> Option<f64> {
    let spread = spectral_spread(values);
    min_spectral_gap(values).map(|g| if spread > 0.0 { g / spread } else { 0.0 })
}

pub fn verify_penta(rep: &AntiSpinRep, op: &AnsatzOperator, n1: usize, n2: usize) -> Result<PentaReport> {
    let dim = rep.dimension();
    for (name, c) in [("N1", n1), ("N2", n2)] {
        if c > rep.n {
            return Err(invalid(name, format!("cutoff {c} exceeds N = {}", rep.n)));
        }
    }
    let comm_e = commutator_residual(&op.e, &projector(dim, n1))?;
    let comm_d = commutator_residual(&op.d, &projector(dim, n2))?;
    let s = rep.eigenbasis()?;
    let conj = s.transpose().try_mul(&op.e)?.try_mul(&s)?;
    let comm_d_conjugated = commutator_residual(&conj, &projector(dim, n2))?;
    let scale = op.e.max_abs().max(f64::MIN_POSITIVE);
    let mut outside = 0.0f64;
    for i in 0..dim {
        for j in 0..dim {
            if i.abs_diff(j) > 2 {
                outside = outside.max(op.e[(i, j)].abs());
            }
        }
    }
    let spectrum = |m: &Matrix, k: usize| -> Result<Vec<f64>> {
        Ok(sym_eigen(&SymmetricMatrix::from_dense(&m.leading_block(k), 1e-10)?)?
            .values()
            .to_vec())
    };
    let restricted_e = spectrum(&op.e, n1 + 1)?;
    let restricted_d = spectrum(&op.d, n2 + 1)?;
    let refusal = match require_simple_spectrum(&restricted_e).and_then(|_| require_simple_spectrum(&restricted_d)) {
        Ok(()) => None,
        Err(e @ Error::DegenerateSpectrum { .. }) => Some(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(PentaReport {
        n1,
        n2,
        comm_e,
        comm_d,
        comm_d_conjugated,
        outside_band: outside / scale,
        asymmetry: op.e.asymmetry(),
        gap_ratio_e: gap_ratio(&restricted_e),
        gap_ratio_d: gap_ratio(&restricted_d),
        simple: refusal.is_none(),
        restricted_e,
        restricted_d,
        refusal,
    })
}

/// Builds and verifies one ansatz.
pub fn analyze_antikraw(n: usize, n1: usize, n2: usize, ansatz: Ansatz) -> Result<(AnsatzOperator, PentaReport)> {
    let rep = make_antispin(n)?;
    let op = build_operator(&rep, ansatz, n1, n2)?;
    let report = verify_penta(&rep, &op, n1, n2)?;
    Ok((op, report))
}

/// One cell of a scan over all admissible cutoffs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub n: usize,
    pub n1: usize,
    pub n2: usize,
    pub comm_e: f64,
    pub comm_d: f64,
    pub gap_ratio_e: Option<f64>,
    pub gap_ratio_d: Option<f64>,
    pub simple: bool,
}

/// Solved pentadiagonal operator for every `1 ≤ N1, N2 ≤ N − 2`.
pub fn scan_penta(n: usize) -> Result<Vec<ScanEntry>> {
    let rep = make_antispin(n)?;
    let mut out = Vec::new();
    for n1 in 1..=n.saturating_sub(2) {
        for n2 in 1..=n - 2 {
            let op = build_operator(&rep, Ansatz::Pentadiagonal, n1, n2)?;
            let r = verify_penta(&rep, &op, n1, n2)?;
            out.push(ScanEntry {
                n,
                n1,
                n2,
                comm_e: r.comm_e,
                comm_d: r.comm_d,
                gap_ratio_e: r.gap_ratio_e,
                gap_ratio_d: r.gap_ratio_d,
                simple: r.simple,
            });
        }
    }
    Ok(out)
}

/// Relative least-squares residuals of `L1L2²L1`, `L2L1²L2` and
/// `(L1L2)² + (L2L1)²` against `{L1²,L2²}`, `{L1²,L2}`, `{L2²,L1}`, `L1²`,
/// `L2²`, `L1`, `L2`, `I`.
pub fn degree_four_dependence(rep: &AntiSpinRep) -> Result<[f64; 3]> {
    let (a, b) = (rep.l1(), rep.l2());
    let (a2, b2) = (&a * &a, &b * &b);
    let basis = [
        anticommutator(&a2, &b2)?,
        anticommutator(&a2, &b)?,
        anticommutator(&b2, &a)?,
        a2.clone(),
        b2.clone(),
        a.clone(),
        b.clone(),
        Matrix::identity(rep.dimension()),
    ];
    let rows = rep.dimension() * rep.dimension();
    let design = Matrix::from_fn(rows, basis.len(), |r, c| basis[c].as_slice()[r]);
    let ab = &a * &b;
    let ba = &b * &a;
    let targets = [&(&a * &b2) * &a, &(&b * &a2) * &b, &(&ab * &ab) + &(&ba * &ba)];
    let mut out = [0.0; 3];
    for (o, t) in out.iter_mut().zip(&targets) {
        let (_, res) = least_squares(&design, t.as_slice())?;
        *o = res / t.frobenius_norm();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_rep() {
        let r = make_antispin(0).unwrap();
        assert_eq!(r.l1()[(0, 0)], 0.5);
        assert_eq!(r.l2()[(0, 0)], 0.5);
        assert!((r.casimir_value() - 0.75).abs() < 1e-15);
        assert!(r.casimir_residual() < 1e-15);
    }

    #[test]
    fn odd_degree_rejected() {
        assert!(make_antispin(5).is_err());
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(3), 32.5);
        assert_eq!(kappa(5), 72.5);
    }

    #[test]
    fn zero_alpha_is_bare_anticommutator() {
        let r = make_antispin(6).unwrap();
        let c = PentaCoefficients {
            alpha: [0.0; 6],
            kappa1: 0.0,
            kappa2: 0.0,
        };
        let m = assemble_penta_direct(&r, &c).unwrap();
        let (l1, l2) = (r.l1(), r.l2());
        let want = anticommutator(&(&l1 * &l1), &(&l2 * &l2)).unwrap();
        assert!((&m - &want).max_abs() < 1e-12);
        let bands = penta_band_coeffs(&r, &c);
        assert!(bands.f.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cutoffs_validated() {
        let r = make_antispin(8).unwrap();
        assert!(solve_penta_coeffs(&r, 0, 3).is_err());
        assert!(solve_penta_coeffs(&r, 3, 7).is_err());
        assert!(bilinear_tau(&r, 8, 2).is_err());
    }
}
