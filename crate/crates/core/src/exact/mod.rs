//! Exact arithmetic: integer polynomials, real root isolation, factorization
//! over Q, and real number fields with a distinguished real embedding.

pub mod compositum;
pub mod factor;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod serde_int;

pub use compositum::{compositum, factor_over_field, roots_in_field, Compositum, KPoly};
pub use factor::{factor_over_rationals, Factorization};
pub use field::{compare, AlgebraicReal, RealNumberField};
pub use matrix::IntMatrix;
pub use poly::{IntPolynomial, QPoly};
pub use roots::{isolate_real_roots, Interval};

use thiserror::Error;

/// Default bound on compositum and norm-polynomial degrees.
pub const DEFAULT_DEGREE_CAP: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("the zero polynomial has no roots or factorization")]
    ZeroPolynomial,
    #[error("squarefree degree {0} exceeds the factorization cap")]
    FactorDegreeTooLarge(usize),
    #[error("numerical root finding did not converge")]
    NumericFailure,
    #[error("common field of degree {degree} exceeds the cap {cap}")]
    CompositumTooLarge { degree: usize, cap: usize },
    #[error("defining polynomial {0} is reducible over Q")]
    Reducible(String),
    #[error("interval {interval} does not isolate exactly one root of {poly}")]
    NotIsolating { poly: String, interval: String },
    #[error("elements live in different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse algebraic number: {0}")]
    Parse(String),
}

/// Render a rational as `p` or `p/q`.
pub fn fmt_rational(x: &num_rational::BigRational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<num_rational::BigRational, ExactError> {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| ExactError::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(ExactError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(num_rational::BigRational::new(n, d))
}
