//! Exact arithmetic in cyclotomic fields Q(zeta_m) and exact linear algebra
//! over them.
//!
//! The scalar type for everything downstream is [`CycNumber`], a rational
//! coefficient vector reduced modulo the m-th cyclotomic polynomial. Matrices
//! of such scalars ([`CycMatrix`]) carry the reduced-row-echelon machinery
//! used for fixed spaces, stratification and rank bookkeeping.

mod cyclotomic;
mod matrix;

pub use cyclotomic::{cyclotomic_polynomial, CycNumber};
pub use matrix::{CycMatrix, Rref};

use num::BigRational;

/// Arbitrary-precision rational scalar. Always stored reduced with a
/// positive denominator.
pub type Rational = BigRational;

/// Largest cyclotomic order accepted anywhere. The worked examples need
/// m <= 12; the guard protects against accidental huge orders.
pub const MAX_CYCLOTOMIC_ORDER: usize = 10_000;

/// Largest matrix side accepted anywhere.
pub const MAX_MATRIX_DIM: usize = 64;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

/// Shorthand for the rational n/d. Panics if d == 0.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
