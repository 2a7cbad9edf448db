//! Dense and banded symmetric linear algebra.

mod banded;
mod dense;
mod eigen;
mod solve;
mod symmetric;

pub use banded::BandedOperator;
pub use dense::Matrix;
pub use eigen::{sym_eigen, Spectrum};
pub use solve::{least_squares, solve_dense};
pub use symmetric::SymmetricMatrix;

use crate::error::{Error, Result};

/// Norms below this are treated as zero when forming relative residuals.
pub const NORM_FLOOR: f64 = 1e-30;

/// Absolute tolerance used in place of a relative one when the reference
/// norm is below [`NORM_FLOOR`].
pub const ABSOLUTE_FALLBACK: f64 = 1e-14;

/// `true` when `value <= rtol * norm`, falling back to the absolute
/// tolerance [`ABSOLUTE_FALLBACK`] when `norm` is negligible.
pub fn within_tolerance(value: f64, norm: f64, rtol: f64) -> bool {
    if norm < NORM_FLOOR {
        value <= ABSOLUTE_FALLBACK
    } else {
        value <= rtol * norm
    }
}

/// `AB − BA`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Ok(&a.try_mul(b)? - &b.try_mul(a)?)
}

/// `AB + BA`.
pub fn anticommutator(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    Ok(&a.try_mul(b)? + &b.try_mul(a)?)
}

/// Relative commutator residual `‖AB − BA‖_F / (‖A‖_F ‖B‖_F)`.
///
/// Returns 0 when either norm vanishes.
pub fn commutator_residual(a: &Matrix, b: &Matrix) -> Result<f64> {
    if !a.is_square() || a.rows() != b.rows() || b.cols() != a.cols() {
        return Err(Error::SizeMismatch {
            left: a.rows(),
            right: b.rows(),
        });
    }
    let na = a.frobenius_norm();
    let nb = b.frobenius_norm();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok(commutator(a, b)?.frobenius_norm() / (na * nb))
}

/// Smallest distance between neighbours of the sorted sequence.
///
/// `None` for sequences with fewer than two values, where a gap is not
/// defined.
pub fn min_spectral_gap(values: &[f64]) -> Option<f64> {
    if values.len() < 2 {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).map(|w| (w[1] - w[0]).abs()).reduce(f64::min)
}

/// `max − min` of a sequence (0 for fewer than two values).
pub fn spectral_spread(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 {
        0.0
    } else {
        hi - lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn commutator_of_matrix_with_itself_vanishes() {
        let a = Matrix::from_fn(4, 4, |i, j| (i * 3 + j) as f64);
        assert_eq!(commutator_residual(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn two_by_two_commutator_residual() {
        let a = Matrix::from_diagonal(&[1.0, 2.0]);
        let b = Matrix::tridiagonal(&[1.0], &[0.0, 0.0]);
        // [A, B] = [[0, -1], [1, 0]]: Frobenius norm √2 over ‖A‖‖B‖ = √5·√2.
        let r = commutator_residual(&a, &b).unwrap();
        assert!((r - 1.0 / 5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_operand_gives_zero_residual() {
        let a = Matrix::identity(3);
        assert_eq!(commutator_residual(&a, &Matrix::zeros(3, 3)).unwrap(), 0.0);
    }

    #[test]
    fn commutator_size_mismatch() {
        let r = commutator_residual(&Matrix::identity(2), &Matrix::identity(3));
        assert!(matches!(r, Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn gaps() {
        assert_eq!(min_spectral_gap(&[1.0, 3.0, 3.0, 7.0]), Some(0.0));
        assert_eq!(min_spectral_gap(&[2.0, 0.0, 1.0]), Some(1.0));
        assert_eq!(min_spectral_gap(&[5.0]), None);
        assert_eq!(spectral_spread(&[2.0, -1.0, 0.5]), 3.0);
    }

    #[test]
    fn tolerance_fallback() {
        assert!(within_tolerance(1e-15, 0.0, 1e-3));
        assert!(!within_tolerance(1e-13, 0.0, 1e-3));
        assert!(within_tolerance(1e-13, 1.0, 1e-12));
    }

    proptest! {
        #[test]
        fn commutator_residual_symmetric_in_arguments(
            n in 1usize..8,
            x in proptest::collection::vec(-5.0f64..5.0, 64),
            y in proptest::collection::vec(-5.0f64..5.0, 64),
        ) {
            let a = SymmetricMatrix::from_lower_fn(n, |i, j| x[i * 8 + j]).unwrap().to_dense();
            let b = SymmetricMatrix::from_lower_fn(n, |i, j| y[i * 8 + j]).unwrap().to_dense();
            let ab = commutator_residual(&a, &b).unwrap();
            let ba = commutator_residual(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-15 * ab.max(1.0));
        }

        #[test]
        fn banded_round_trip(
            n in 1usize..10,
            bw in 0usize..4,
            x in proptest::collection::vec(-5.0f64..5.0, 100),
        ) {
            let dense = Matrix::from_fn(n, n, |i, j| {
                if i.abs_diff(j) <= bw { x[i * 10 + j] } else { 0.0 }
            });
            let banded = BandedOperator::from_dense(&dense, bw).unwrap();
            prop_assert_eq!(&banded.to_dense(), &dense);
            let again = BandedOperator::from_dense(&banded.to_dense(), bw).unwrap();
            prop_assert_eq!(again, banded);
        }
    }
}
