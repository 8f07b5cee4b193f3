use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Mul, Neg};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Exact scalar `q * sqrt(r)` with `q` rational and `r` a squarefree positive
/// integer. Zero is stored as `0 * sqrt(1)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QSqrt {
    q: Rational,
    r: BigUint,
}

impl QSqrt {
    pub fn zero() -> Self {
        QSqrt {
            q: Rational::zero(),
            r: BigUint::one(),
        }
    }

    pub fn from_rational(q: Rational) -> Self {
        QSqrt {
            q,
            r: BigUint::one(),
        }
    }

    /// `q * sqrt(r)` for an arbitrary positive integer `r`; square factors of
    /// `r` are moved into `q` by trial division.
    pub fn new(q: Rational, r: BigUint) -> Self {
        assert!(!r.is_zero(), "radicand must be positive");
        if q.is_zero() {
            return Self::zero();
        }
        let (outside, inside) = split_square(r);
        QSqrt {
            q: q * Rational::from_integer(BigInt::from(outside)),
            r: inside,
        }
    }

    /// `sqrt(x)` for a nonnegative rational, `sqrt(n/d) = sqrt(n d) / d`.
    pub fn sqrt_of(x: &Rational) -> Result<Self> {
        if x.is_negative() {
            return Err(Error::Domain(format!("square root of negative {}", x)));
        }
        if x.is_zero() {
            return Ok(Self::zero());
        }
        let n = x.numer().magnitude() * x.denom().magnitude();
        let d = Rational::from_integer(x.denom().clone());
        Ok(Self::new(d.recip(), n))
    }

    /// `sign * sqrt(prod p^e)` given prime exponents (negative exponents allowed).
    pub fn from_prime_exponents(sign: i32, exps: &BTreeMap<u64, i64>) -> Self {
        if sign == 0 {
            return Self::zero();
        }
        let mut q = Rational::from_integer(BigInt::from(sign.signum()));
        let mut r = BigUint::one();
        for (&p, &e) in exps {
            let half = e.div_euclid(2);
            if e.rem_euclid(2) == 1 {
                r *= p;
            }
            let pb = Rational::from_integer(BigInt::from(p));
            if half >= 0 {
                q *= super::rat_pow(&pb, half as u32);
            } else {
                q /= super::rat_pow(&pb, (-half) as u32);
            }
        }
        QSqrt { q, r }
    }

    pub fn rational_part(&self) -> &Rational {
        &self.q
    }

    pub fn radicand(&self) -> &BigUint {
        &self.r
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.r.is_one()
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.q.clone())
    }

    /// Square of the value, always rational.
    pub fn square(&self) -> Rational {
        &self.q * &self.q * Rational::from_integer(BigInt::from(self.r.clone()))
    }

    pub fn signum(&self) -> i32 {
        if self.q.is_zero() {
            0
        } else if self.q.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn to_f64(&self) -> f64 {
        super::to_f64(&self.q) * self.r.to_f64().unwrap_or(f64::INFINITY).sqrt()
    }

    pub fn try_add(&self, other: &QSqrt) -> Result<QSqrt> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.r != other.r {
            return Err(Error::IncompatibleRadicands(
                self.r.to_string(),
                other.r.to_string(),
            ));
        }
        let q = &self.q + &other.q;
        if q.is_zero() {
            return Ok(Self::zero());
        }
        Ok(QSqrt {
            q,
            r: self.r.clone(),
        })
    }

    pub fn scale(&self, c: &Rational) -> QSqrt {
        if c.is_zero() {
            return Self::zero();
        }
        QSqrt {
            q: &self.q * c,
            r: self.r.clone(),
        }
    }
}

fn split_square(mut r: BigUint) -> (BigUint, BigUint) {
    let mut outside = BigUint::one();
    let mut inside = BigUint::one();
    let mut p = BigUint::from(2u32);
    while &p * &p <= r {
        let mut e = 0u32;
        while (&r % &p).is_zero() {
            r /= &p;
            e += 1;
        }
        for _ in 0..e / 2 {
            outside *= &p;
        }
        if e % 2 == 1 {
            inside *= &p;
        }
        p += 1u32;
    }
    inside *= r;
    (outside, inside)
}

impl Mul for &QSqrt {
    type Output = QSqrt;
    fn mul(self, rhs: &QSqrt) -> QSqrt {
        if self.is_zero() || rhs.is_zero() {
            return QSqrt::zero();
        }
        // r1 r2 = g^2 (r1/g)(r2/g) with the cofactor squarefree
        let g = self.r.gcd(&rhs.r);
        let r = (&self.r / &g) * (&rhs.r / &g);
        QSqrt {
            q: &self.q * &rhs.q * Rational::from_integer(BigInt::from_biguint(Sign::Plus, g)),
            r,
        }
    }
}

impl Mul for QSqrt {
    type Output = QSqrt;
    fn mul(self, rhs: QSqrt) -> QSqrt {
        &self * &rhs
    }
}

impl Neg for QSqrt {
    type Output = QSqrt;
    fn neg(self) -> QSqrt {
        QSqrt {
            q: -self.q,
            r: self.r,
        }
    }
}

impl fmt::Display for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.r.is_one() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*sqrt({})", self.q, self.r)
        }
    }
}

impl fmt::Debug for QSqrt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Exact sum of `QSqrt` values with possibly different radicands, kept as a
/// rational coefficient per squarefree radicand. Square roots of distinct
/// squarefree integers are linearly independent over the rationals, so the
/// sum is zero exactly when every coefficient is.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct RadicalSum {
    parts: BTreeMap<BigUint, Rational>,
}

impl RadicalSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: &QSqrt) {
        if x.is_zero() {
            return;
        }
        let slot = self.parts.entry(x.r.clone()).or_insert_with(Rational::zero);
        *slot += &x.q;
        if slot.is_zero() {
            self.parts.remove(&x.r);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// The single-radical value, if the sum has collapsed to one.
    pub fn to_qsqrt(&self) -> Option<QSqrt> {
        match self.parts.len() {
            0 => Some(QSqrt::zero()),
            1 => {
                let (r, q) = self.parts.iter().next().unwrap();
                Some(QSqrt {
                    q: q.clone(),
                    r: r.clone(),
                })
            }
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.parts
            .iter()
            .map(|(r, q)| super::to_f64(q) * r.to_f64().unwrap_or(f64::INFINITY).sqrt())
            .sum()
    }
}

impl fmt::Debug for RadicalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(r, q)| format!("{}*sqrt({})", q, r))
            .collect();
        write!(f, "RadicalSum[{}]", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn s(q: Rational, r: u32) -> QSqrt {
        QSqrt::new(q, BigUint::from(r))
    }

    #[test]
    fn root_two_squared() {
        let a = s(int(1), 2);
        assert_eq!(&a * &a, QSqrt::from_rational(int(2)));
        assert!((&a * &a).is_rational());
    }

    #[test]
    fn same_radical_addition() {
        let x = s(rat(1, 2), 3).try_add(&s(rat(1, 3), 3)).unwrap();
        assert_eq!(x, s(rat(5, 6), 3));
    }

    #[test]
    fn mixed_radicals_rejected() {
        assert!(matches!(
            s(int(1), 2).try_add(&s(int(1), 3)),
            Err(Error::IncompatibleRadicands(_, _))
        ));
    }

    #[test]
    fn normalization_extracts_squares() {
        let x = s(int(1), 72);
        assert_eq!(x.rational_part(), &int(6));
        assert_eq!(x.radicand(), &BigUint::from(2u32));
        let y = QSqrt::sqrt_of(&rat(1, 2)).unwrap();
        assert_eq!(y, s(rat(1, 2), 2));
    }

    #[test]
    fn gcd_product() {
        // sqrt(6) sqrt(10) = 2 sqrt(15)
        assert_eq!(&s(int(1), 6) * &s(int(1), 10), s(int(2), 15));
    }

    #[test]
    fn prime_exponents() {
        let mut e = BTreeMap::new();
        e.insert(2, 3);
        e.insert(3, -1);
        // sqrt(8/3) = 2 sqrt(2/3) = (2/3) sqrt(6)
        assert_eq!(QSqrt::from_prime_exponents(1, &e), s(rat(2, 3), 6));
    }

    #[test]
    fn radical_sum_cancels() {
        let mut acc = RadicalSum::new();
        acc.add(&s(int(1), 2));
        acc.add(&s(int(1), 3));
        acc.add(&s(int(-1), 2));
        assert_eq!(acc.to_qsqrt(), Some(s(int(1), 3)));
        acc.add(&s(int(-1), 3));
        assert!(acc.is_zero());
    }
}
