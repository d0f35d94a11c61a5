//! Shared numeric kernel: exact rationals, multivariate polynomials and
//! rational functions, truncated Laurent expansions, residues and a complex
//! polynomial root finder.

mod field;
pub mod laurent;
pub mod linalg;
pub mod mpoly;
pub mod ratf;
pub mod roots;
mod scalar;
pub mod upoly;

pub use field::Field;
pub use laurent::{LaurentJet, Site};
pub use mpoly::{MPoly, Var};
pub use ratf::RatF;
pub use roots::{roots_numeric, RootOptions};
pub use scalar::{int, rat, rat_to_f64, Scalar};
pub use upoly::UPoly;

pub use num_complex::Complex64 as CScalar;

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum NumError {
    #[error("denominator is identically zero")]
    IdenticallyZeroDenominator,
    #[error("leading coefficient vanishes")]
    LeadingCoefficientVanishes,
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("site {0} is not a pole of order computable here")]
    BadSite(String),
    #[error("rational function is not polynomial in the leading variable of its denominator")]
    NonMonicDenominator,
}
