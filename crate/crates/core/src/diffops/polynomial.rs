use std::fmt;

/// Real polynomial with coefficients in ascending powers of `x`.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has an
/// empty coefficient list.
#[derive(Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// `c · x^k`.
    pub fn monomial(c: f64, k: usize) -> Self {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// `x − root`.
    pub fn linear_factor(root: f64) -> Self {
        Self::new(vec![-root, 1.0])
    }

    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// `Σ |c_k| |x|^k`, the magnitude scale of an evaluation at `x`.
    pub fn eval_scale(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x.abs() + c.abs())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(self.coeffs.iter().map(|v| c * v).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| self.coeffs.get(k).copied().unwrap_or(0.0) + other.coeffs.get(k).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// Exact division by `x − root`: `Some(quotient)` only if the remainder
    /// of synthetic division is exactly zero.
    pub fn divide_linear(&self, root: f64) -> Option<Self> {
        let n = self.coeffs.len();
        if n == 0 {
            return Some(Self::zero());
        }
        let mut quotient = vec![0.0; n - 1];
        let mut carry = 0.0;
        for k in (0..n).rev() {
            let v = self.coeffs[k] + carry * root;
            if k == 0 {
                return (v == 0.0).then(|| Self::new(quotient));
            }
            quotient[k - 1] = v;
            carry = v;
        }
        unreachable!()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0.0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}·x")?,
                _ => write!(f, "{c}·x^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Polynomial::new(vec![1.0, 2.0]); // 1 + 2x
        let q = Polynomial::new(vec![0.0, 0.0, 3.0]); // 3x²
        assert_eq!(p.mul(&q).coeffs(), &[0.0, 0.0, 3.0, 6.0]);
        assert_eq!(p.add(&q).coeffs(), &[1.0, 2.0, 3.0]);
        assert!(p.sub(&p).is_zero());
        assert_eq!(q.derivative().coeffs(), &[0.0, 6.0]);
        assert_eq!(p.eval(2.0), 5.0);
        assert_eq!(Polynomial::linear_factor(1.0).pow(2).coeffs(), &[1.0, -2.0, 1.0]);
    }

    #[test]
    fn exact_linear_division() {
        // x² − 1 = (x − 1)(x + 1)
        let p = Polynomial::new(vec![-1.0, 0.0, 1.0]);
        assert_eq!(p.divide_linear(1.0).unwrap().coeffs(), &[1.0, 1.0]);
        assert_eq!(p.divide_linear(-1.0).unwrap().coeffs(), &[-1.0, 1.0]);
        assert!(p.divide_linear(0.0).is_none());
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Polynomial::new(vec![1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(Polynomial::zero().degree(), None);
    }
}
