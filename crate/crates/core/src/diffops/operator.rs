use std::collections::BTreeMap;
use std::fmt;

use super::{Polynomial, RationalCoefficient};
use crate::error::{Error, Result};

/// Highest derivative order an operator may carry (products of two
/// fourth-order operators).
pub const MAX_ORDER: usize = 8;

/// Linear differential operator `Σ_k c_k(x) ∂^k` in normal-ordered form
/// (coefficients to the left of derivatives).
///
/// Zero coefficients are never stored, so two operators built along
/// different routes compare structurally once their coefficients agree.
#[derive(Clone, PartialEq, Default)]
pub struct DiffOperator {
    terms: BTreeMap<usize, RationalCoefficient>,
}

impl DiffOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::multiplication(RationalCoefficient::constant(1.0))
    }

    /// Multiplication by a function.
    pub fn multiplication(c: impl Into<RationalCoefficient>) -> Self {
        Self::term(0, c).expect("order 0 is always admissible")
    }

    /// `∂^k`.
    pub fn derivative(k: usize) -> Result<Self> {
        Self::term(k, RationalCoefficient::constant(1.0))
    }

    /// `c(x) ∂^k`.
    pub fn term(k: usize, c: impl Into<RationalCoefficient>) -> Result<Self> {
        if k > MAX_ORDER {
            return Err(Error::OrderTooHigh {
                order: k,
                max: MAX_ORDER,
            });
        }
        let mut terms = BTreeMap::new();
        let c = c.into();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        Ok(Self { terms })
    }

    /// Builds `Σ c_k ∂^k` from polynomial coefficients given in ascending
    /// derivative order.
    pub fn from_polynomials(coeffs: &[Polynomial]) -> Result<Self> {
        coeffs
            .iter()
            .enumerate()
            .try_fold(Self::zero(), |acc, (k, p)| Ok(acc.add(&Self::term(k, p.clone())?)))
    }

    pub fn terms(&self) -> &BTreeMap<usize, RationalCoefficient> {
        &self.terms
    }

    /// Coefficient of `∂^k` (zero if absent).
    pub fn coefficient(&self, k: usize) -> RationalCoefficient {
        self.terms.get(&k).cloned().unwrap_or_else(RationalCoefficient::zero)
    }

    /// Highest derivative order, `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&k, c) in &other.terms {
            let sum = match terms.get(&k) {
                Some(existing) => existing.add(c),
                None => c.clone(),
            };
            if sum.is_zero() {
                terms.remove(&k);
            } else {
                terms.insert(k, sum);
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(&k, v)| (k, v.scale(c)))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    /// Normal-ordered product `self ∘ other` by the Leibniz rule
    /// `p ∂^i ∘ q ∂^j = Σ_k C(i,k) p q^{(i−k)} ∂^{j+k}`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let order = self.order().unwrap_or(0) + other.order().unwrap_or(0);
        if order > MAX_ORDER {
            return Err(Error::OrderTooHigh { order, max: MAX_ORDER });
        }
        let mut out = Self::zero();
        for (&j, q) in &other.terms {
            let mut derivs = vec![q.clone()];
            for (&i, p) in &self.terms {
                while derivs.len() <= i {
                    let next = derivs.last().unwrap().derivative();
                    derivs.push(next);
                }
                for k in 0..=i {
                    let c = p.mul(&derivs[i - k]).scale(binomial(i, k));
                    out = out.add(&Self::term(j + k, c)?);
                }
            }
        }
        Ok(out)
    }

    /// `PQ + QP`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        Ok(self.compose(other)?.add(&other.compose(self)?))
    }

    /// `PQ − QP`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.compose(other)?.sub(&other.compose(self)?))
    }

    /// Coefficient-wise equality by cross-multiplication: for every order,
    /// `num_P·den_Q − num_Q·den_P` must vanish to `tol` relative to the
    /// larger of the two products (and at least 1).
    pub fn equals(&self, other: &Self, tol: f64) -> bool {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .all(|&k| cross_defect(&self.coefficient(k), &other.coefficient(k)) <= tol)
    }

    /// Largest relative cross-multiplied coefficient defect over all orders.
    pub fn max_defect(&self, other: &Self) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|&k| cross_defect(&self.coefficient(k), &other.coefficient(k)))
            .fold(0.0, f64::max)
    }
}

fn cross_defect(p: &RationalCoefficient, q: &RationalCoefficient) -> f64 {
    let left = p.numerator().mul(&q.denominator());
    let right = q.numerator().mul(&p.denominator());
    let scale = left.max_abs().max(right.max_abs()).max(1.0);
    left.sub(&right).max_abs() / scale
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl fmt::Debug for DiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| match k {
                0 => format!("{c:?}"),
                1 => format!("{c:?}∂"),
                _ => format!("{c:?}∂^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Outcome of the boundary test `A(e) = 0`, `B(e) = A′(e)` at one endpoint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BoundaryCheck {
    Satisfied,
    /// Holds the offending values `A(e)` and `B(e) − A′(e)`.
    Violated {
        a: f64,
        b_minus_da: f64,
    },
    /// A coefficient has a pole at the endpoint; nothing was evaluated.
    Pole,
}

impl BoundaryCheck {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Satisfied)
    }
}

/// Relative tolerance of the boundary test.
pub const BOUNDARY_RTOL: f64 = 1e-12;

/// Checks, for a second-order operator `A ∂² + B ∂ + C`, the conditions
/// `A(e) = 0` and `B(e) = A′(e)` under which it commutes with the
/// restriction to an interval ending at `e`.
pub fn boundary_commutation_check(m: &DiffOperator, endpoints: &[f64]) -> Result<Vec<BoundaryCheck>> {
    if let Some(order) = m.order().filter(|&o| o > 2) {
        return Err(Error::OrderTooHigh { order, max: 2 });
    }
    let a = m.coefficient(2);
    let b = m.coefficient(1);
    let da = a.derivative();
    Ok(endpoints
        .iter()
        .map(|&e| {
            let (Some(av), Some(bv), Some(dav)) = (a.eval(e), b.eval(e), da.eval(e)) else {
                return BoundaryCheck::Pole;
            };
            let scale_a = a.eval_scale(e).unwrap_or(0.0).max(1.0);
            let scale_b = b
                .eval_scale(e)
                .unwrap_or(0.0)
                .max(da.eval_scale(e).unwrap_or(0.0))
                .max(1.0);
            let diff = bv - dav;
            if av.abs() <= BOUNDARY_RTOL * scale_a && diff.abs() <= BOUNDARY_RTOL * scale_b {
                BoundaryCheck::Satisfied
            } else {
                BoundaryCheck::Violated {
                    a: av,
                    b_minus_da: diff,
                }
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[f64]) -> Polynomial {
        Polynomial::new(c.to_vec())
    }

    fn x_times() -> DiffOperator {
        DiffOperator::multiplication(poly(&[0.0, 1.0]))
    }

    #[test]
    fn leibniz_d_after_x() {
        let d = DiffOperator::derivative(1).unwrap();
        let got = d.compose(&x_times()).unwrap();
        let want = DiffOperator::from_polynomials(&[poly(&[1.0]), poly(&[0.0, 1.0])]).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn adding_zero_keeps_canonical_form() {
        let d2 = DiffOperator::derivative(2).unwrap();
        assert_eq!(d2.add(&DiffOperator::zero()), d2);
        assert_eq!(d2.sub(&d2), DiffOperator::zero());
        assert!(d2.sub(&d2).terms().is_empty());
    }

    #[test]
    fn half_anticommutator_of_free_particle_and_x_squared() {
        let l = DiffOperator::derivative(2).unwrap().scale(-1.0);
        let w = DiffOperator::multiplication(poly(&[0.0, 0.0, 1.0]));
        let got = l.anticommutator(&w).unwrap().scale(0.5);
        let want =
            DiffOperator::from_polynomials(&[poly(&[-1.0]), poly(&[0.0, -2.0]), poly(&[0.0, 0.0, -1.0])]).unwrap();
        assert!(got.equals(&want, 1e-14), "{got:?}");
    }

    #[test]
    fn hermite_operator_symmetrized_with_x() {
        // D = ∂² − 2x∂: ½{D, x} = x∂² + (1 − 2x²)∂ − x
        let d = DiffOperator::from_polynomials(&[Polynomial::zero(), poly(&[0.0, -2.0]), poly(&[1.0])]).unwrap();
        let got = d.anticommutator(&x_times()).unwrap().scale(0.5);
        let want =
            DiffOperator::from_polynomials(&[poly(&[0.0, -1.0]), poly(&[1.0, 0.0, -2.0]), poly(&[0.0, 1.0])]).unwrap();
        assert!(got.equals(&want, 1e-14), "{got:?}");
    }

    #[test]
    fn trivial_anticommutators() {
        let p = DiffOperator::from_polynomials(&[poly(&[1.0]), poly(&[2.0, 3.0])]).unwrap();
        let id = DiffOperator::identity();
        assert!(p.anticommutator(&id).unwrap().equals(&p.scale(2.0), 0.0));
        let xx = x_times().anticommutator(&x_times()).unwrap();
        assert_eq!(xx, DiffOperator::multiplication(poly(&[0.0, 0.0, 2.0])));
    }

    #[test]
    fn inequality_detected() {
        let d = DiffOperator::derivative(1).unwrap();
        let xd = DiffOperator::term(1, poly(&[0.0, 1.0])).unwrap();
        assert!(!d.equals(&xd, 1e-12));
        assert!(d.equals(&d, 0.0));
    }

    #[test]
    fn order_limit() {
        assert!(DiffOperator::derivative(MAX_ORDER + 1).is_err());
        let d5 = DiffOperator::derivative(5).unwrap();
        assert!(matches!(d5.compose(&d5), Err(Error::OrderTooHigh { order: 10, .. })));
    }

    #[test]
    fn boundary_conditions() {
        // ∂(T² − x²)∂ = (T² − x²)∂² − 2x∂
        let t = 1.5;
        let m = DiffOperator::from_polynomials(&[Polynomial::zero(), poly(&[0.0, -2.0]), poly(&[t * t, 0.0, -1.0])])
            .unwrap();
        let r = boundary_commutation_check(&m, &[-t, t, 0.0]).unwrap();
        assert!(r[0].holds() && r[1].holds());
        assert!(!r[2].holds());

        let d2 = DiffOperator::derivative(2).unwrap();
        let r = boundary_commutation_check(&d2, &[0.0]).unwrap();
        assert_eq!(
            r[0],
            BoundaryCheck::Violated {
                a: 1.0,
                b_minus_da: 0.0
            }
        );
    }

    #[test]
    fn boundary_pole_is_flagged() {
        let m = DiffOperator::term(1, RationalCoefficient::laurent(1.0, 0, 1)).unwrap();
        let r = boundary_commutation_check(&m, &[0.0, 2.0]).unwrap();
        assert_eq!(r[0], BoundaryCheck::Pole);
        assert_ne!(r[1], BoundaryCheck::Pole);
    }

    #[test]
    fn boundary_check_rejects_high_order() {
        let d3 = DiffOperator::derivative(3).unwrap();
        assert!(boundary_commutation_check(&d3, &[0.0]).is_err());
    }
}
