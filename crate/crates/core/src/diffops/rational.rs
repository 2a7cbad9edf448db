use std::fmt;

use super::Polynomial;
use crate::error::{Error, Result};

/// Roots of the admissible denominator factors `x`, `x − 1`, `x + 1`.
const POLE_ROOTS: [f64; 3] = [0.0, 1.0, -1.0];

/// Rational function `numerator / (x^p (x − 1)^q (x + 1)^r)`.
///
/// The denominator is monic and restricted to the three pole locations
/// that occur for the classical operators. Common factors between numerator
/// and denominator are cancelled only when the division is exact.
#[derive(Clone, PartialEq)]
pub struct RationalCoefficient {
    numerator: Polynomial,
    /// Exponents of `x`, `x − 1`, `x + 1`.
    poles: [u32; 3],
}

impl RationalCoefficient {
    pub fn zero() -> Self {
        Self::polynomial(Polynomial::zero())
    }

    pub fn constant(c: f64) -> Self {
        Self::polynomial(Polynomial::constant(c))
    }

    pub fn polynomial(p: Polynomial) -> Self {
        Self {
            numerator: p,
            poles: [0; 3],
        }
    }

    /// `c · x^k / x^m`, a Laurent monomial written over `x^m`.
    pub fn laurent(c: f64, k: usize, m: u32) -> Self {
        Self {
            numerator: Polynomial::monomial(c, k),
            poles: [m, 0, 0],
        }
        .normalized()
    }

    /// Builds `numerator / denominator`, factoring the denominator into
    /// powers of `x`, `x − 1`, `x + 1` times a nonzero constant.
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::UnsupportedDenominator);
        }
        let mut rest = denominator;
        let mut poles = [0u32; 3];
        for (slot, &root) in POLE_ROOTS.iter().enumerate() {
            while rest.degree().unwrap_or(0) > 0 {
                match rest.divide_linear(root) {
                    Some(q) => {
                        rest = q;
                        poles[slot] += 1;
                    }
                    None => break,
                }
            }
        }
        if rest.degree() != Some(0) {
            return Err(Error::UnsupportedDenominator);
        }
        let lead = rest.coeffs()[0];
        Ok(Self {
            numerator: numerator.scale(1.0 / lead),
            poles,
        }
        .normalized())
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    /// Exponents of `x`, `x − 1`, `x + 1` in the denominator.
    pub fn pole_orders(&self) -> [u32; 3] {
        self.poles
    }

    /// Expanded monic denominator polynomial.
    pub fn denominator(&self) -> Polynomial {
        POLE_ROOTS
            .iter()
            .zip(self.poles)
            .fold(Polynomial::constant(1.0), |acc, (&root, k)| {
                acc.mul(&Polynomial::linear_factor(root).pow(k))
            })
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    /// Value at `x`, or `None` when `x` is a pole of the representation.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let d = self.denominator().eval(x);
        (d != 0.0).then(|| self.numerator.eval(x) / d)
    }

    /// Magnitude scale `Σ|n_k||x|^k / |den(x)|` of an evaluation at `x`.
    pub fn eval_scale(&self, x: f64) -> Option<f64> {
        let d = self.denominator().eval(x);
        (d != 0.0).then(|| self.numerator.eval_scale(x) / d.abs())
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            numerator: self.numerator.scale(c),
            poles: self.poles,
        }
        .normalized()
    }

    pub fn add(&self, other: &Self) -> Self {
        let poles = [0, 1, 2].map(|i| self.poles[i].max(other.poles[i]));
        let lift = |r: &Self| {
            POLE_ROOTS
                .iter()
                .enumerate()
                .fold(r.numerator.clone(), |acc, (i, &root)| {
                    acc.mul(&Polynomial::linear_factor(root).pow(poles[i] - r.poles[i]))
                })
        };
        Self {
            numerator: lift(self).add(&lift(other)),
            poles,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            numerator: self.numerator.mul(&other.numerator),
            poles: [0, 1, 2].map(|i| self.poles[i] + other.poles[i]),
        }
        .normalized()
    }

    /// `(n/d)' = n'/d − n·(p/x + q/(x−1) + r/(x+1))/d`.
    pub fn derivative(&self) -> Self {
        let mut out = Self {
            numerator: self.numerator.derivative(),
            poles: self.poles,
        };
        for (i, &k) in self.poles.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let mut poles = self.poles;
            poles[i] += 1;
            let term = Self {
                numerator: self.numerator.scale(-(k as f64)),
                poles,
            };
            out = out.add(&term);
        }
        out.normalized()
    }

    /// Cancels exact common linear factors; the zero function gets a
    /// trivial denominator.
    fn normalized(mut self) -> Self {
        if self.numerator.is_zero() {
            self.poles = [0; 3];
            return self;
        }
        for (i, &root) in POLE_ROOTS.iter().enumerate() {
            while self.poles[i] > 0 {
                match self.numerator.divide_linear(root) {
                    Some(q) => {
                        self.numerator = q;
                        self.poles[i] -= 1;
                    }
                    None => break,
                }
            }
        }
        self
    }
}

impl fmt::Debug for RationalCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})", self.numerator)?;
        for (name, k) in ["x", "(x-1)", "(x+1)"].iter().zip(self.poles) {
            if k > 0 {
                write!(f, "/{name}^{k}")?;
            }
        }
        Ok(())
    }
}

impl From<f64> for RationalCoefficient {
    fn from(c: f64) -> Self {
        Self::constant(c)
    }
}

impl From<Polynomial> for RationalCoefficient {
    fn from(p: Polynomial) -> Self {
        Self::polynomial(p)
    }
}
