//! Exact arithmetic: rationals, sparse multivariate polynomials, truncated
//! power series, skew-symmetric matrices with their Pfaffian, and the
//! `QSqrt` scalar used for Wigner symbols.

mod pfaffian;
mod poly;
mod qsqrt;
mod series;

pub use pfaffian::{
    determinant, pfaffian, pfaffian_rational, SkewMatrix, COMBINATORIAL_PFAFFIAN_MAX,
};
pub use poly::{Monomial, SparsePoly};
pub use qsqrt::{QSqrt, RadicalSum};
pub use series::{series_inverse_square, TruncatedSeries, DEFAULT_DEGREE};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Arbitrary precision rational, always reduced with positive denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for `n/d`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `p/q` or `p` into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(p, q))
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    // Shift large operands so the quotient of the two f64 conversions stays finite.
    let n = q.numer();
    let d = q.denom();
    match (n.to_f64(), d.to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let shift = (n.bits().max(d.bits()) as i64 - 900).max(0) as usize;
            let a = (n >> shift).to_f64().unwrap_or(0.0);
            let b = (d >> shift).to_f64().unwrap_or(1.0);
            a / b
        }
    }
}

/// `(-1)^n`.
pub fn sign_pow(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn rat_pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Coefficient ring used by polynomials, Pfaffians and Grassmann elements.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add_ref(&self, other: &Self) -> Self;
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }
}

impl Ring for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
}

impl Ring for SparsePoly {
    fn zero_like(&self) -> Self {
        SparsePoly::zero(self.nvars())
    }
    fn one_like(&self) -> Self {
        SparsePoly::one(self.nvars())
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn sub_ref(&self, other: &Self) -> Self {
        self - other
    }
}
