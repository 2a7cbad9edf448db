use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::diffops::{DiffOperator, Polynomial, RationalCoefficient};
use crate::error::{invalid, Result};
use crate::leonard::Recurrence;

/// Classical family with a second-order differential operator.
///
/// The Laguerre parameter follows the weight `x^{−α} e^{−x}`, so the
/// customary Laguerre parameter is `−α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FamilyKind {
    Hermite,
    Laguerre { alpha: f64 },
    Jacobi { alpha: f64, beta: f64 },
}

/// Orthonormal classical polynomials: weight normalized to unit mass,
/// recurrence, eigenvalue map and the constants of the commuting operator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalFamily {
    kind: FamilyKind,
    /// Logarithm of the reciprocal total mass of the unnormalized weight.
    log_norm: f64,
}

pub fn make_family(kind: FamilyKind) -> Result<ClassicalFamily> {
    let log_norm = match kind {
        FamilyKind::Hermite => -0.5 * std::f64::consts::PI.ln(),
        FamilyKind::Laguerre { alpha } => {
            if !(alpha.is_finite() && alpha <= 0.0) {
                return Err(invalid(
                    "alpha",
                    format!("Laguerre alpha = {alpha} must be finite and <= 0"),
                ));
            }
            -ln_gamma(1.0 - alpha)
        }
        FamilyKind::Jacobi { alpha, beta } => {
            for (name, v) in [("alpha", alpha), ("beta", beta)] {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(invalid(name, format!("Jacobi {name} = {v} must be finite and >= 0")));
                }
            }
            let s = alpha + beta;
            let mu0 = 2f64.powf(s + 1.0) * gamma(alpha + 1.0) * gamma(beta + 1.0) / gamma(s + 2.0);
            -mu0.ln()
        }
    };
    Ok(ClassicalFamily { kind, log_norm })
}

impl ClassicalFamily {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            FamilyKind::Hermite => "hermite",
            FamilyKind::Laguerre { .. } => "laguerre",
            FamilyKind::Jacobi { .. } => "jacobi",
        }
    }

    /// Support `(left, right)`, with infinite ends as `±∞`.
    pub fn support(&self) -> (f64, f64) {
        match self.kind {
            FamilyKind::Hermite => (f64::NEG_INFINITY, f64::INFINITY),
            FamilyKind::Laguerre { .. } => (0.0, f64::INFINITY),
            FamilyKind::Jacobi { .. } => (-1.0, 1.0),
        }
    }

    /// Weight density with unit total mass; zero outside the support.
    pub fn weight(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(x > lo && x < hi) {
            return 0.0;
        }
        let log_w = match self.kind {
            FamilyKind::Hermite => -x * x,
            FamilyKind::Laguerre { alpha } => -alpha * x.ln() - x,
            FamilyKind::Jacobi { alpha, beta } => alpha * (1.0 - x).ln() + beta * (1.0 + x).ln(),
        };
        (log_w + self.log_norm).exp()
    }

    /// `(a_1..a_{size−1}, b_0..b_{size−1})` of the orthonormal recurrence
    /// `x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n−1}`.
    pub fn recurrence_coeffs(&self, size: usize) -> (Vec<f64>, Vec<f64>) {
        let ns = 1..size;
        match self.kind {
            FamilyKind::Hermite => (ns.map(|n| (n as f64 / 2.0).sqrt()).collect(), vec![0.0; size]),
            FamilyKind::Laguerre { alpha } => {
                let a = -alpha;
                (
                    ns.map(|n| {
                        let n = n as f64;
                        (n * (n + a)).sqrt()
                    })
                    .collect(),
                    (0..size).map(|n| 2.0 * n as f64 + a + 1.0).collect(),
                )
            }
            FamilyKind::Jacobi { alpha, beta } => {
                let s = alpha + beta;
                let b = (0..size)
                    .map(|n| {
                        if n == 0 {
                            (beta - alpha) / (s + 2.0)
                        } else {
                            let n = n as f64;
                            (beta * beta - alpha * alpha) / ((2.0 * n + s) * (2.0 * n + s + 2.0))
                        }
                    })
                    .collect();
                let a = ns
                    .map(|n| {
                        let n = n as f64;
                        let d = 2.0 * n + s;
                        (4.0 * n * (n + alpha) * (n + beta) * (n + s) / (d * d * (d + 1.0) * (d - 1.0))).sqrt()
                    })
                    .collect();
                (a, b)
            }
        }
    }

    pub fn recurrence(&self, size: usize) -> Result<Recurrence> {
        let (a, b) = self.recurrence_coeffs(size);
        Recurrence::new(a, b)
    }

    /// `Λ_n` with `D p_n = Λ_n p_n`.
    pub fn eigenvalue(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            FamilyKind::Hermite => -2.0 * n,
            FamilyKind::Laguerre { .. } => -n,
            FamilyKind::Jacobi { alpha, beta } => -n * (n + alpha + beta + 1.0),
        }
    }

    /// `σ_N` making `½{L,Λ} − WΛ + σL` commute with the kernel matrix.
    pub fn sigma(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            FamilyKind::Hermite => 2.0 * n + 1.0,
            FamilyKind::Laguerre { .. } => n + 0.5,
            FamilyKind::Jacobi { alpha, beta } => (n + 1.0).powi(2) + (n + 0.5) * (alpha + beta),
        }
    }

    /// `A_N` of the divergence form `(1/ρ)∂((x−W)p∂) + A_N x`.
    pub fn a_constant(&self, n: usize) -> f64 {
        let n = n as f64;
        match self.kind {
            FamilyKind::Hermite => 2.0 * n,
            FamilyKind::Laguerre { .. } => n,
            FamilyKind::Jacobi { alpha, beta } => n * (n + alpha + beta + 2.0),
        }
    }

    /// Multiple of the identity added to the Perline form of the local
    /// operator; it does not affect commutation.
    pub fn identity_shift(&self) -> f64 {
        match self.kind {
            FamilyKind::Hermite => 0.0,
            FamilyKind::Laguerre { alpha } => (alpha + 1.0) / 2.0,
            FamilyKind::Jacobi { alpha, beta } => (alpha - beta) / 2.0,
        }
    }

    /// `q = p/ρ`, the factor in `D = (1/ρ)∂(qρ∂)`.
    pub fn flux_factor(&self) -> Polynomial {
        match self.kind {
            FamilyKind::Hermite => Polynomial::constant(1.0),
            FamilyKind::Laguerre { .. } => Polynomial::monomial(1.0, 1),
            FamilyKind::Jacobi { .. } => Polynomial::new(vec![1.0, 0.0, -1.0]),
        }
    }

    /// `ρ′/ρ` as a rational function.
    pub fn weight_log_derivative(&self) -> RationalCoefficient {
        match self.kind {
            FamilyKind::Hermite => Polynomial::monomial(-2.0, 1).into(),
            FamilyKind::Laguerre { alpha } => RationalCoefficient::laurent(-alpha, 0, 1).add(&(-1.0).into()),
            FamilyKind::Jacobi { alpha, beta } => {
                let left = RationalCoefficient::new(Polynomial::constant(alpha), Polynomial::new(vec![-1.0, 1.0]))
                    .expect("pole at 1");
                let right = RationalCoefficient::new(Polynomial::constant(beta), Polynomial::new(vec![1.0, 1.0]))
                    .expect("pole at -1");
                left.add(&right)
            }
        }
    }

    /// The polynomial-preserving operator `D = q∂² + (q′ + qρ′/ρ)∂`.
    pub fn operator_d(&self) -> DiffOperator {
        let q = self.flux_factor();
        let first = RationalCoefficient::from(q.derivative())
            .add(&RationalCoefficient::from(q.clone()).mul(&self.weight_log_derivative()));
        DiffOperator::term(2, q)
            .expect("order 2")
            .add(&DiffOperator::term(1, first).expect("order 1"))
    }
}
