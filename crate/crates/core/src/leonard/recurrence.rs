use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{min_spectral_gap, spectral_spread, sym_eigen, SymmetricMatrix};

/// Orthonormal three-term recurrence
/// `x φ_n = a_{n+1} φ_{n+1} + b_n φ_n + a_n φ_{n−1}`, `φ_{−1} = 0`, `φ_0 = 1`.
///
/// `a[k]` stores `a_{k+1}`, so a recurrence of size `N + 1` carries `N`
/// off-diagonal and `N + 1` diagonal coefficients: exactly the Jacobi
/// matrix `tridiag(a, b)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Recurrence {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Recurrence {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if b.is_empty() {
            return Err(invalid("b", "recurrence needs at least one diagonal coefficient"));
        }
        if a.len() + 1 != b.len() {
            return Err(Error::SizeMismatch {
                left: a.len() + 1,
                right: b.len(),
            });
        }
        if let Some(k) = a.iter().position(|v| !v.is_finite() || *v == 0.0) {
            return Err(invalid(
                "a",
                format!("a_{} = {} must be finite and nonzero", k + 1, a[k]),
            ));
        }
        if let Some(k) = b.iter().position(|v| !v.is_finite()) {
            return Err(invalid("b", format!("b_{k} is not finite")));
        }
        Ok(Self { a, b })
    }

    /// Number of polynomials `φ_0..φ_N` the recurrence defines.
    pub fn size(&self) -> usize {
        self.b.len()
    }

    /// Off-diagonal coefficients `a_1..a_N`.
    pub fn a(&self) -> &[f64] {
        &self.a
    }

    /// Diagonal coefficients `b_0..b_N`.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn jacobi_matrix(&self) -> SymmetricMatrix {
        SymmetricMatrix::tridiagonal(&self.a, &self.b).expect("lengths validated on construction")
    }

    fn check_degree(&self, up_to: usize) -> Result<()> {
        if up_to >= self.size() {
            return Err(invalid(
                "up_to",
                format!("degree {up_to} needs a_{up_to}, recurrence has size {}", self.size()),
            ));
        }
        Ok(())
    }

    /// `φ_0(x)..φ_{up_to}(x)`.
    pub fn eval(&self, x: f64, up_to: usize) -> Result<Vec<f64>> {
        self.check_degree(up_to)?;
        let mut out = Vec::with_capacity(up_to + 1);
        let (mut prev, mut cur) = (0.0, 1.0);
        out.push(cur);
        for n in 0..up_to {
            let an = if n == 0 { 0.0 } else { self.a[n - 1] };
            let next = ((x - self.b[n]) * cur - an * prev) / self.a[n];
            prev = cur;
            cur = next;
            out.push(cur);
        }
        Ok(out)
    }

    /// Values and first derivatives, the latter from the differentiated
    /// recurrence `a_{n+1} φ'_{n+1} = φ_n + (x − b_n) φ'_n − a_n φ'_{n−1}`.
    pub fn eval_with_derivative(&self, x: f64, up_to: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let values = self.eval(x, up_to)?;
        let mut deriv = Vec::with_capacity(up_to + 1);
        let (mut prev, mut cur) = (0.0, 0.0);
        deriv.push(cur);
        for (n, &v) in values.iter().enumerate().take(up_to) {
            let an = if n == 0 { 0.0 } else { self.a[n - 1] };
            let next = (v + (x - self.b[n]) * cur - an * prev) / self.a[n];
            prev = cur;
            cur = next;
            deriv.push(cur);
        }
        Ok((values, deriv))
    }

    /// Christoffel–Darboux closed form of `Σ_{k≤n} φ_k(x) φ_k(y)`:
    /// `a_{n+1}(φ_{n+1}(x)φ_n(y) − φ_n(x)φ_{n+1}(y)) / (x − y)`, with the
    /// confluent limit `a_{n+1}(φ'_{n+1}φ_n − φ'_nφ_{n+1})` when `x = y`.
    pub fn christoffel_darboux(&self, x: f64, y: f64, n: usize) -> Result<f64> {
        self.check_degree(n + 1)?;
        let an1 = self.a[n];
        if x == y {
            let (p, d) = self.eval_with_derivative(x, n + 1)?;
            return Ok(an1 * (d[n + 1] * p[n] - d[n] * p[n + 1]));
        }
        let px = self.eval(x, n + 1)?;
        let py = self.eval(y, n + 1)?;
        Ok(an1 * (px[n + 1] * py[n] - px[n] * py[n + 1]) / (x - y))
    }
}

/// `φ_0(x)..φ_{up_to}(x)` for the recurrence.
pub fn eval_orthonormal(rec: &Recurrence, x: f64, up_to: usize) -> Result<Vec<f64>> {
    rec.eval(x, up_to)
}

/// Gauss nodes (ascending) and weights of a Jacobi matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridWeights {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridWeights {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Golub–Welsch: the nodes are the eigenvalues of `tridiag(a, b)` and each
/// weight is the squared first component of the normalized eigenvector.
pub fn grid_weights(rec: &Recurrence) -> Result<GridWeights> {
    let spec = sym_eigen(&rec.jacobi_matrix())?;
    let nodes = spec.values().to_vec();
    if let Some(gap) = min_spectral_gap(&nodes) {
        let threshold = 1e-13 * spectral_spread(&nodes).max(1.0);
        if gap <= threshold {
            return Err(Error::DegenerateSpectrum {
                min_gap: gap,
                threshold,
            });
        }
    }
    let weights: Vec<f64> = (0..nodes.len()).map(|k| spec.vectors()[(0, k)].powi(2)).collect();
    if let Some(k) = weights.iter().position(|w| *w <= 0.0) {
        return Err(invalid("a", format!("Gauss weight {k} is not positive")));
    }
    Ok(GridWeights { nodes, weights })
}
