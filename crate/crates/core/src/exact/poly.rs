use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// The variable count is fixed at creation; zero coefficients are never
/// stored. Terms are kept in lexicographic exponent order, which is also the
/// order of the canonical text form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The variable `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, Rational::one())
    }

    pub fn monomial(exps: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars])
    }

    /// Adds `c * x^exps` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, exps: Monomial, c: Rational) {
        assert_eq!(exps.len(), self.nvars, "monomial arity mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn homogeneous_part(&self, d: u32) -> SparsePoly {
        self.filter(|e| e.iter().sum::<u32>() == d)
    }

    pub fn truncate(&self, d: u32) -> SparsePoly {
        self.filter(|e| e.iter().sum::<u32>() <= d)
    }

    fn filter(&self, keep: impl Fn(&Monomial) -> bool) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| keep(e))
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(self.nvars);
        }
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Product with every monomial of total degree above `cutoff` discarded.
    pub fn mul_truncated(&self, other: &SparsePoly, cutoff: u32) -> SparsePoly {
        assert_eq!(self.nvars, other.nvars);
        let mut out = SparsePoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            let da: u32 = ea.iter().sum();
            if da > cutoff {
                continue;
            }
            for (eb, cb) in &other.terms {
                let db: u32 = eb.iter().sum();
                if da + db > cutoff {
                    continue;
                }
                let e: Monomial = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> SparsePoly {
        let mut acc = SparsePoly::one(self.nvars);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = super::to_f64(c);
                for (x, &k) in point.iter().zip(e) {
                    t *= x.powi(k as i32);
                }
                t
            })
            .sum()
    }

    pub fn derivative(&self, var: usize) -> SparsePoly {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, c * Rational::from_integer(e[var].into()));
        }
        out
    }

    /// `p(t * point)` as a polynomial in the single variable `t`.
    pub fn graded_at(&self, point: &[Rational]) -> SparsePoly {
        let mut out = SparsePoly::zero(1);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            out.add_term(vec![e.iter().sum()], t);
        }
        out
    }

    /// `p(point + eps)` expanded in the shift variables `eps`.
    pub fn shifted(&self, point: &[Rational]) -> SparsePoly {
        assert_eq!(point.len(), self.nvars);
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            // product over variables of (x0 + eps)^k
            let mut term = SparsePoly::constant(self.nvars, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let mut factor = SparsePoly::zero(self.nvars);
                let mut binom = Rational::one();
                for j in 0..=k {
                    // binom(k, j) x0^(k-j) eps^j
                    let mut ex = vec![0; self.nvars];
                    ex[i] = j;
                    factor.add_term(ex, &binom * super::rat_pow(&point[i], k - j));
                    binom = binom * Rational::from_integer((k - j).into())
                        / Rational::from_integer((j + 1).into());
                }
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }

    /// Divides every exponent by two. Used after computing in square-root
    /// variables `u_e` with `Y_e = u_e^2`.
    pub fn halve_exponents(&self) -> Result<SparsePoly> {
        let mut out = SparsePoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if let Some(var) = e.iter().position(|k| k % 2 != 0) {
                return Err(Error::NonIntegerExponent { var });
            }
            out.add_term(e.iter().map(|k| k / 2).collect(), c.clone());
        }
        Ok(out)
    }

    /// `p(u_1^2, ..., u_n^2)`.
    pub fn double_exponents(&self) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.iter().map(|k| 2 * k).collect(), c.clone()))
                .collect(),
        }
    }

    /// Renames variables: variable `i` of `self` becomes `map[i]` among `nvars`.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> SparsePoly {
        let mut out = SparsePoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; nvars];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    /// Canonical sorted text form, one term per line: `coef Y1^a Y3^b`.
    pub fn to_canonical_text(&self) -> String {
        let mut s = String::new();
        for (e, c) in &self.terms {
            s.push_str(&format_term(e, c));
            s.push('\n');
        }
        s
    }
}

pub(crate) fn format_monomial(e: &[u32]) -> String {
    let parts: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &k)| k > 0)
        .map(|(i, k)| format!("Y{}^{}", i + 1, k))
        .collect();
    parts.join(" ")
}

fn format_term(e: &[u32], c: &Rational) -> String {
    let m = format_monomial(e);
    if m.is_empty() {
        c.to_string()
    } else {
        format!("{} {}", c, m)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            let a = c.abs();
            let m = format_monomial(e).replace(' ', "*");
            match (m.is_empty(), a.is_one()) {
                (true, _) => write!(f, "{}", a)?,
                (false, true) => write!(f, "{}", m)?,
                (false, false) => write!(f, "{}*{}", a, m)?,
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl<'a> Mul<&'a SparsePoly> for &'a SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        self.mul_truncated(rhs, u32::MAX)
    }
}

impl Neg for &SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        SparsePoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Add for SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: SparsePoly) -> SparsePoly {
        &self + &rhs
    }
}

impl Sub for SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: SparsePoly) -> SparsePoly {
        &self - &rhs
    }
}

impl Mul for SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: SparsePoly) -> SparsePoly {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};

    fn theta_p() -> SparsePoly {
        let y = |i| SparsePoly::var(3, i);
        let one = SparsePoly::one(3);
        one + y(0) * y(1) + y(0) * y(2) + y(1) * y(2)
    }

    #[test]
    fn canonical_text_is_sorted() {
        let p = theta_p();
        assert_eq!(
            p.to_canonical_text(),
            "1\n1 Y2^1 Y3^1\n1 Y1^1 Y3^1\n1 Y1^1 Y2^1\n"
        );
        assert_eq!(p.to_string(), "1 + Y2^1*Y3^1 + Y1^1*Y3^1 + Y1^1*Y2^1");
    }

    #[test]
    fn cancellation_drops_terms() {
        let p = theta_p();
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn eval_and_derivative() {
        let p = theta_p();
        let y = vec![rat(1, 2); 3];
        assert_eq!(p.eval(&y), rat(7, 4));
        // d/dY1 = Y2 + Y3
        assert_eq!(p.derivative(0).eval(&y), int(1));
    }

    #[test]
    fn shift_expansion_matches_evaluation() {
        let p = theta_p().pow(2);
        let x0 = vec![rat(1, 3), rat(-2, 5), rat(3, 7)];
        let q = p.shifted(&x0);
        let eps = vec![rat(1, 11), rat(2, 13), rat(-1, 17)];
        let sum: Vec<Rational> = x0.iter().zip(&eps).map(|(a, b)| a + b).collect();
        assert_eq!(q.eval(&eps), p.eval(&sum));
    }

    #[test]
    fn halving_requires_even_exponents() {
        let p = theta_p();
        assert_eq!(p.double_exponents().halve_exponents().unwrap(), p);
        assert!(matches!(
            p.halve_exponents(),
            Err(Error::NonIntegerExponent { .. })
        ));
    }

    #[test]
    fn graded_evaluation() {
        let p = theta_p();
        let g = p.graded_at(&vec![rat(1, 3); 3]);
        assert_eq!(g.coeff(&[0]), int(1));
        assert_eq!(g.coeff(&[2]), rat(1, 3));
    }
}
