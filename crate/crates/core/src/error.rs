use thiserror::Error;

/// Errors produced by the numerical and symbolic routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("entry ({row}, {col}) = {value:e} lies outside declared bandwidth {bandwidth}")]
    OutsideBand {
        row: usize,
        col: usize,
        value: f64,
        bandwidth: usize,
    },

    #[error("matrix is not symmetric: |a[{row},{col}] - a[{col},{row}]| = {defect:e}")]
    NotSymmetric { row: usize, col: usize, defect: f64 },

    #[error("singular linear system (pivot {pivot:e} in column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("denominator is not a product of powers of x, x - 1 and x + 1")]
    UnsupportedDenominator,

    #[error("operator of order {order} exceeds the supported order {max}")]
    OrderTooHigh { order: usize, max: usize },

    #[error("not a Leonard pair: {0}")]
    InvalidPair(String),

    #[error(
        "degenerate restricted spectrum: minimum gap {min_gap:e} <= {threshold:e}; \
         the commuting operator fails to have a simple spectrum"
    )]
    DegenerateSpectrum { min_gap: f64, threshold: f64 },

    #[error("operators do not commute: relative residual {residual:e} > {tolerance:e}")]
    NotCommuting { residual: f64, tolerance: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("quadrature did not converge: achieved error {achieved:e} after {panels} panels")]
    QuadratureNotConverged { achieved: f64, panels: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
