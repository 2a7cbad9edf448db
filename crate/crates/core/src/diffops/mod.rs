//! Canonical-form calculus for linear differential operators with rational
//! coefficients.

mod operator;
mod polynomial;
mod rational;

pub use operator::{boundary_commutation_check, BoundaryCheck, DiffOperator, BOUNDARY_RTOL, MAX_ORDER};
pub use polynomial::Polynomial;
pub use rational::RationalCoefficient;

use crate::error::Result;

pub fn op_add(p: &DiffOperator, q: &DiffOperator) -> DiffOperator {
    p.add(q)
}

pub fn op_scale(c: f64, p: &DiffOperator) -> DiffOperator {
    p.scale(c)
}

pub fn op_compose(p: &DiffOperator, q: &DiffOperator) -> Result<DiffOperator> {
    p.compose(q)
}

pub fn anticommutator(p: &DiffOperator, q: &DiffOperator) -> Result<DiffOperator> {
    p.anticommutator(q)
}

pub fn op_equal(p: &DiffOperator, q: &DiffOperator, tol: f64) -> bool {
    p.equals(q, tol)
}

/// Multiplication by the polynomial with the given ascending coefficients.
pub fn mul_poly(coeffs: &[f64]) -> DiffOperator {
    DiffOperator::multiplication(Polynomial::new(coeffs.to_vec()))
}
