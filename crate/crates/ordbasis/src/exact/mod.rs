//! Exact arithmetic substrate: rationals, dense univariate polynomials
//! over ℚ, rational functions, and exact linear algebra.

pub mod matrix;
pub mod poly;
pub mod ratfunc;

pub use matrix::QMatrix;
pub use poly::Poly;
pub use ratfunc::RatFunc;

use num::BigInt;

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type QRat = num::BigRational;
pub type Int = BigInt;

pub fn qint(n: i64) -> QRat {
    QRat::from_integer(BigInt::from(n))
}

pub fn qfrac(num: i64, den: i64) -> QRat {
    QRat::new(BigInt::from(num), BigInt::from(den))
}
