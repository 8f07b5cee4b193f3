//! Finite exterior algebra keyed by generator bitmasks, Berezin integration,
//! and the fermionic integrals that reproduce the loop polynomial.
//!
//! Sign conventions. Monomials are stored in ascending generator order. Edge
//! terms pair `psi_s psi_t`; corner terms use `psi_t psi_s`, which together
//! with faces carrying an odd number of traversal-aligned edges gives every
//! loop a positive sign. Measures are ordered so that the configuration made
//! only of edge terms integrates to `+1`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::exact::{Rational, Ring, SparsePoly};
use crate::graph::{Orientation, PlanarGraph};

/// Default bound on the number of generators for graph integrals.
pub const GENERATOR_LIMIT: usize = 24;

/// Sign of `m_a * m_b` relative to the ascending monomial of `a | b`, or
/// `None` when the masks overlap.
#[inline]
pub fn product_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        // generators of a above j must cross it
        let above = if j == 63 { 0 } else { a >> (j + 1) };
        inversions += above.count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

/// Element of the exterior algebra on `n` generators (n <= 64).
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannElement<T> {
    n: usize,
    zero: T,
    terms: BTreeMap<u64, T>,
}

impl<T: Ring> GrassmannElement<T> {
    pub fn zero(n: usize, zero: &T) -> Self {
        assert!(n <= 64, "at most 64 generators");
        GrassmannElement {
            n,
            zero: zero.zero_like(),
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: T) -> Self {
        let mut x = Self::zero(n, &c);
        x.add_term(0, c);
        x
    }

    pub fn one(n: usize, proto: &T) -> Self {
        Self::scalar(n, proto.one_like())
    }

    pub fn generator(n: usize, i: usize, proto: &T) -> Self {
        let mut x = Self::zero(n, proto);
        x.add_term(1 << i, proto.one_like());
        x
    }

    /// `c * psi_{gens[0]} psi_{gens[1]} ...` in the given (not necessarily
    /// ascending) order.
    pub fn monomial(n: usize, gens: &[usize], c: T) -> Self {
        let mut x = Self::zero(n, &c);
        let mut mask = 0u64;
        let mut negate = false;
        for &g in gens {
            match product_sign(mask, 1 << g) {
                None => return x,
                Some(s) => negate ^= s,
            }
            mask |= 1 << g;
        }
        x.add_term(mask, if negate { c.neg_ref() } else { c });
        x
    }

    pub fn num_generators(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&u64, &T)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mask: u64) -> T {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| self.zero.clone())
    }

    fn add_term(&mut self, mask: u64, c: T) {
        if c.is_zero_elem() {
            return;
        }
        let merged = match self.terms.remove(&mask) {
            Some(old) => old.add_ref(&c),
            None => c,
        };
        if !merged.is_zero_elem() {
            self.terms.insert(mask, merged);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        let mut out = Self::zero(self.n, &self.zero);
        for (&m, v) in &self.terms {
            out.add_term(m, v.mul_ref(c));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n, &self.zero);
        for (&a, ca) in &self.terms {
            for (&b, cb) in &other.terms {
                if let Some(neg) = product_sign(a, b) {
                    let c = ca.mul_ref(cb);
                    out.add_term(a | b, if neg { c.neg_ref() } else { c });
                }
            }
        }
        out
    }

    /// Coefficient of `psi_0 psi_1 ... psi_{n-1}`.
    pub fn top_coefficient(&self) -> T {
        self.coeff(full_mask(self.n))
    }

    /// Coefficient of `psi_{order[0]} psi_{order[1]} ...`; `order` must be a
    /// permutation of all generators.
    pub fn berezin(&self, order: &[usize]) -> Result<T> {
        let sign = permutation_sign(self.n, order)?;
        let top = self.top_coefficient();
        Ok(if sign { top.neg_ref() } else { top })
    }

    /// Splits a homogeneous degree-2 element into terms `c * psi_a psi_b`, a < b.
    pub fn quadratic_terms(&self) -> Result<Vec<(usize, usize, T)>> {
        self.terms
            .iter()
            .map(|(&m, c)| {
                if m.count_ones() != 2 {
                    return Err(Error::NotQuadratic);
                }
                let a = m.trailing_zeros() as usize;
                let b = 63 - m.leading_zeros() as usize;
                Ok((a, b, c.clone()))
            })
            .collect()
    }

    /// `exp(q)` for quadratic `q`: the terms commute and square to zero, so
    /// the exponential is the product of `1 + q_i`.
    pub fn exp_quadratic(&self) -> Result<Self> {
        let terms = self.quadratic_terms()?;
        let mut acc = Self::one(self.n, &self.zero);
        for (a, b, c) in terms {
            let mut factor = Self::one(self.n, &self.zero);
            factor.add_term(1 << a | 1 << b, c);
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }
}

fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Parity of the permutation `order` of `0..n` (true = odd).
fn permutation_sign(n: usize, order: &[usize]) -> Result<bool> {
    let mut seen = 0u64;
    for &g in order {
        if g >= n || seen >> g & 1 == 1 {
            return Err(Error::IncompleteOrder(n));
        }
        seen |= 1 << g;
    }
    if order.len() != n {
        return Err(Error::IncompleteOrder(n));
    }
    let mut inv = 0usize;
    let mut placed = 0u64;
    for &g in order {
        inv += (placed >> g).count_ones() as usize;
        placed |= 1 << g;
    }
    Ok(inv % 2 == 1)
}

/// `c * psi_a psi_b` with `a`, `b` in the stated order.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadTerm<T> {
    pub a: usize,
    pub b: usize,
    pub coeff: T,
}

/// Berezin integral of `exp(sum of terms)` over `n` generators with measure
/// `order`, multiplying factors one at a time and dropping any partial
/// monomial whose missing generators no remaining factor can supply.
pub fn integrate_exp<T: Ring>(
    n: usize,
    terms: &[QuadTerm<T>],
    order: &[usize],
    proto: &T,
) -> Result<T> {
    let sign = permutation_sign(n, order)?;
    let full = full_mask(n);
    // process factors by their highest generator so generators close early
    let mut fs: Vec<(u64, bool, T)> = terms
        .iter()
        .filter(|t| !t.coeff.is_zero_elem() && t.a != t.b)
        .map(|t| {
            let (lo, hi, neg) = if t.a < t.b {
                (t.a, t.b, false)
            } else {
                (t.b, t.a, true)
            };
            (1u64 << lo | 1u64 << hi, neg, t.coeff.clone())
        })
        .collect();
    fs.sort_by_key(|(m, _, _)| (63 - m.leading_zeros(), m.trailing_zeros()));
    let mut supply = vec![0u64; fs.len() + 1];
    for i in (0..fs.len()).rev() {
        supply[i] = supply[i + 1] | fs[i].0;
    }
    let mut state: BTreeMap<u64, T> = BTreeMap::new();
    state.insert(0, proto.one_like());
    for (i, (fm, fneg, fc)) in fs.iter().enumerate() {
        let mut next: BTreeMap<u64, T> = BTreeMap::new();
        let later = supply[i + 1];
        let mut push = |m: u64, c: T| {
            if (full & !m) & !later != 0 || c.is_zero_elem() {
                return;
            }
            match next.remove(&m) {
                Some(old) => {
                    let s = old.add_ref(&c);
                    if !s.is_zero_elem() {
                        next.insert(m, s);
                    }
                }
                None => {
                    next.insert(m, c);
                }
            }
        };
        for (&m, c) in &state {
            push(m, c.clone());
            if let Some(neg) = product_sign(m, *fm) {
                let prod = c.mul_ref(fc);
                push(m | fm, if neg ^ fneg { prod.neg_ref() } else { prod });
            }
        }
        state = next;
    }
    let top = state.remove(&full).unwrap_or_else(|| proto.zero_like());
    Ok(if sign { top.neg_ref() } else { top })
}

/// Angle weights `X_alpha` indexed by the angle's `s` half-edge.
pub type AngleWeights<T> = Vec<T>;

/// Formal weights `X_alpha = u_a u_b` in square-root variables `Y_e = u_e^2`.
pub fn formal_angle_weights(g: &PlanarGraph) -> AngleWeights<SparsePoly> {
    let n = g.num_edges();
    g.angles()
        .iter()
        .map(|a| {
            let mut e = vec![0; n];
            e[g.edge_of(a.s_half)] += 1;
            e[g.edge_of(a.t_half)] += 1;
            SparsePoly::monomial(e, Rational::from_integer(1.into()))
        })
        .collect()
}

fn check_limit(count: usize, limit: usize) -> Result<()> {
    if count > limit {
        return Err(Error::SizeLimit {
            what: "grassmann generators",
            actual: count,
            limit,
        });
    }
    Ok(())
}

/// Edge and corner terms of the real action; generator `h` is `psi_h`.
pub fn real_action<T: Ring>(
    g: &PlanarGraph,
    o: &Orientation,
    x: &AngleWeights<T>,
    proto: &T,
) -> Vec<QuadTerm<T>> {
    let mut terms = Vec::new();
    for e in 0..g.num_edges() {
        terms.push(QuadTerm {
            a: g.source_half(o, e),
            b: g.target_half(o, e),
            coeff: proto.one_like(),
        });
    }
    for a in g.angles() {
        terms.push(QuadTerm {
            a: a.t_half,
            b: a.s_half,
            coeff: x[a.s_half].clone(),
        });
    }
    terms
}

fn real_measure(g: &PlanarGraph, o: &Orientation) -> Vec<usize> {
    (0..g.num_edges())
        .flat_map(|e| [g.source_half(o, e), g.target_half(o, e)])
        .collect()
}

/// Real fermionic integral with given angle weights.
pub fn z_f_weighted<T: Ring>(
    g: &PlanarGraph,
    o: &Orientation,
    x: &AngleWeights<T>,
    proto: &T,
    limit: usize,
) -> Result<T> {
    let n = g.num_half_edges();
    check_limit(n, limit)?;
    integrate_exp(n, &real_action(g, o, x, proto), &real_measure(g, o), proto)
}

/// Real fermionic integral with formal weights, as a polynomial in `Y_e`.
pub fn z_f(g: &PlanarGraph, o: &Orientation) -> Result<SparsePoly> {
    let x = formal_angle_weights(g);
    let proto = SparsePoly::zero(g.num_edges());
    z_f_weighted(g, o, &x, &proto, GENERATOR_LIMIT)?.halve_exponents()
}

/// The real action as a single quadratic element (for inspection and the
/// full exponential).
pub fn real_action_element(
    g: &PlanarGraph,
    o: &Orientation,
) -> Result<GrassmannElement<SparsePoly>> {
    let n = g.num_half_edges();
    check_limit(n, GENERATOR_LIMIT)?;
    let x = formal_angle_weights(g);
    let proto = SparsePoly::zero(g.num_edges());
    let mut q = GrassmannElement::zero(n, &proto);
    for t in real_action(g, o, &x, &proto) {
        q = q.add(&GrassmannElement::monomial(n, &[t.a, t.b], t.coeff));
    }
    Ok(q)
}

pub fn real_measure_order(g: &PlanarGraph, o: &Orientation) -> Vec<usize> {
    real_measure(g, o)
}

/// Complex form: `psi_h = 2h`, `psibar_h = 2h + 1`, measure `(psi_h, psibar_h)`
/// by ascending half-edge.
pub fn z_f_complex_weighted<T: Ring>(
    g: &PlanarGraph,
    o: &Orientation,
    x: &AngleWeights<T>,
    proto: &T,
    limit: usize,
) -> Result<T> {
    let nh = g.num_half_edges();
    check_limit(2 * nh, limit)?;
    let one = proto.one_like();
    let mut terms = Vec::new();
    for h in 0..nh {
        terms.push(QuadTerm {
            a: 2 * h,
            b: 2 * h + 1,
            coeff: one.clone(),
        });
    }
    for e in 0..g.num_edges() {
        let (s, t) = (g.source_half(o, e), g.target_half(o, e));
        terms.push(QuadTerm {
            a: 2 * s + 1,
            b: 2 * t + 1,
            coeff: one.neg_ref(),
        });
    }
    for a in g.angles() {
        terms.push(QuadTerm {
            a: 2 * a.t_half,
            b: 2 * a.s_half,
            coeff: x[a.s_half].clone(),
        });
    }
    let order: Vec<usize> = (0..2 * nh).collect();
    integrate_exp(2 * nh, &terms, &order, proto)
}

pub fn z_f_complex(g: &PlanarGraph, o: &Orientation) -> Result<SparsePoly> {
    let x = formal_angle_weights(g);
    let proto = SparsePoly::zero(g.num_edges());
    z_f_complex_weighted(g, o, &x, &proto, GENERATOR_LIMIT)?.halve_exponents()
}

/// Doubled complex form: per half-edge `(psi, eta, psibar, etabar)` at
/// `4h .. 4h + 3`, measure in that order by ascending half-edge.
pub fn z_f_squared_weighted<T: Ring>(
    g: &PlanarGraph,
    o: &Orientation,
    x: &AngleWeights<T>,
    proto: &T,
    limit: usize,
) -> Result<T> {
    let nh = g.num_half_edges();
    check_limit(4 * nh, limit)?;
    let one = proto.one_like();
    let (psi, eta, psibar, etabar) = (0, 1, 2, 3);
    let gen = |h: usize, k: usize| 4 * h + k;
    let mut terms = Vec::new();
    for h in 0..nh {
        terms.push(QuadTerm {
            a: gen(h, psi),
            b: gen(h, etabar),
            coeff: one.clone(),
        });
        terms.push(QuadTerm {
            a: gen(h, psibar),
            b: gen(h, eta),
            coeff: one.clone(),
        });
    }
    for e in 0..g.num_edges() {
        let (s, t) = (g.source_half(o, e), g.target_half(o, e));
        terms.push(QuadTerm {
            a: gen(s, psibar),
            b: gen(t, psibar),
            coeff: one.neg_ref(),
        });
        terms.push(QuadTerm {
            a: gen(s, etabar),
            b: gen(t, etabar),
            coeff: one.neg_ref(),
        });
    }
    for a in g.angles() {
        let c = x[a.s_half].clone();
        terms.push(QuadTerm {
            a: gen(a.t_half, psi),
            b: gen(a.s_half, psi),
            coeff: c.clone(),
        });
        terms.push(QuadTerm {
            a: gen(a.t_half, eta),
            b: gen(a.s_half, eta),
            coeff: c,
        });
    }
    let order: Vec<usize> = (0..4 * nh).collect();
    integrate_exp(4 * nh, &terms, &order, proto)
}

pub fn z_f_squared(g: &PlanarGraph, o: &Orientation) -> Result<SparsePoly> {
    let x = formal_angle_weights(g);
    let proto = SparsePoly::zero(g.num_edges());
    z_f_squared_weighted(g, o, &x, &proto, GENERATOR_LIMIT)?.halve_exponents()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, pfaffian, rat, SkewMatrix};
    use crate::graph::generate;
    use crate::kasteleyn::{make_kasteleyn, vertex_flip};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type G = GrassmannElement<Rational>;

    fn theta_p() -> SparsePoly {
        let y = |i| SparsePoly::var(3, i);
        SparsePoly::one(3) + y(0) * y(1) + y(0) * y(2) + y(1) * y(2)
    }

    #[test]
    fn generators_anticommute() {
        let a = G::generator(3, 0, &int(0));
        let b = G::generator(3, 2, &int(0));
        assert_eq!(a.mul(&b), b.mul(&a).scale(&int(-1)));
        assert!(a.mul(&a).is_empty());
    }

    #[test]
    fn nilpotent_exponential() {
        let q = G::monomial(2, &[0, 1], int(1));
        let e = q.exp_quadratic().unwrap();
        assert_eq!(e, G::one(2, &int(0)).add(&q));
    }

    #[test]
    fn product_of_two_blocks() {
        let q = G::monomial(4, &[0, 1], int(2)).add(&G::monomial(4, &[2, 3], int(3)));
        assert_eq!(q.exp_quadratic().unwrap().top_coefficient(), int(6));
    }

    #[test]
    fn not_quadratic() {
        let q = G::generator(2, 0, &int(0));
        assert_eq!(q.exp_quadratic().unwrap_err(), Error::NotQuadratic);
    }

    #[test]
    fn berezin_normalization() {
        // generators s = 0, t = 1
        let ts = G::monomial(2, &[1, 0], int(1));
        assert_eq!(ts.berezin(&[1, 0]).unwrap(), int(1));
        let st = G::monomial(2, &[0, 1], int(1));
        assert_eq!(st.berezin(&[1, 0]).unwrap(), int(-1));
        assert_eq!(G::one(2, &int(0)).berezin(&[0, 1]).unwrap(), int(0));
        assert_eq!(ts.berezin(&[1]).unwrap_err(), Error::IncompleteOrder(2));
        assert_eq!(ts.berezin(&[1, 1]).unwrap_err(), Error::IncompleteOrder(2));
    }

    #[test]
    fn gaussian_is_pfaffian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [2, 4, 6, 8, 10] {
            let mut m = SkewMatrix::zeros(n, &int(0));
            let mut q = G::zero(n, &int(0));
            for i in 0..n {
                for j in i + 1..n {
                    let v = rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
                    m.set(i, j, v.clone());
                    q = q.add(&G::monomial(n, &[i, j], v));
                }
            }
            let top = q.exp_quadratic().unwrap().top_coefficient();
            assert_eq!(top, pfaffian(&m).unwrap());
            let terms: Vec<QuadTerm<Rational>> = q
                .quadratic_terms()
                .unwrap()
                .into_iter()
                .map(|(a, b, coeff)| QuadTerm { a, b, coeff })
                .collect();
            let order: Vec<usize> = (0..n).collect();
            assert_eq!(integrate_exp(n, &terms, &order, &int(0)).unwrap(), top);
        }
    }

    #[test]
    fn theta_real_form() {
        let g = generate("theta").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        assert_eq!(z_f(&g, &o).unwrap(), theta_p());
        // the full exponential lives in the 64-dimensional algebra
        let q = real_action_element(&g, &o).unwrap();
        let e = q.exp_quadratic().unwrap();
        assert!(e.len() <= 64);
        let top = e.berezin(&real_measure_order(&g, &o)).unwrap();
        assert_eq!(top.halve_exponents().unwrap(), theta_p());
    }

    #[test]
    fn theta_non_kasteleyn_has_negative_loop() {
        let g = generate("theta").unwrap();
        let mut o = make_kasteleyn(&g).unwrap();
        o.flip_edge(0);
        let z = z_f(&g, &o).unwrap();
        assert!(z.terms().any(|(_, c)| *c == int(-1)), "{}", z);
    }

    #[test]
    fn k4_uniform() {
        let g = generate("k4").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        let z = z_f(&g, &o).unwrap();
        let y = rat(2, 7);
        let expect = int(1) + int(4) * &y * &y * &y + int(3) * &y * &y * &y * &y;
        assert_eq!(z.eval(&vec![y; 6]), expect);
    }

    #[test]
    fn class_invariance() {
        let g = generate("k4").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        let z = z_f(&g, &o).unwrap();
        for v in 0..4 {
            assert_eq!(z_f(&g, &vertex_flip(&g, &o, v)).unwrap(), z);
        }
    }

    #[test]
    fn theta_complex_forms() {
        let g = generate("theta").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        assert_eq!(z_f_complex(&g, &o).unwrap(), theta_p());
        assert_eq!(z_f_squared(&g, &o).unwrap(), theta_p().pow(2));
    }

    #[test]
    fn size_limit() {
        let g = generate("dodecahedron").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        assert!(matches!(z_f(&g, &o), Err(Error::SizeLimit { .. })));
    }
}
