pub mod acceptance;
pub mod antikraw;
pub mod contdisc;
pub mod diffops;
pub mod error;
pub mod heun;
pub mod leonard;
pub mod limiting;
pub mod linalg;

pub use diffops::{DiffOperator, Polynomial, RationalCoefficient};
pub use error::{Error, Result};
pub use heun::HeunCoefficients;
pub use leonard::{LeonardPair, Recurrence};
pub use limiting::LimitingReport;
pub use linalg::{BandedOperator, Matrix, Spectrum, SymmetricMatrix};
