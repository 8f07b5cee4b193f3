use std::collections::HashMap;

use num_traits::{One, Zero};

use super::{Rational, Ring};
use crate::error::{Error, Result};

/// Largest dimension for which the perfect-matching expansion is used on dense
/// rational input; larger rational matrices go through elimination.
pub const COMBINATORIAL_PFAFFIAN_MAX: usize = 16;

/// Hard cap on the dimension of any Pfaffian request.
pub const PFAFFIAN_MAX_DIM: usize = 64;

/// Memo-table bound for the matching expansion over non-field entries.
const EXPANSION_STATE_LIMIT: usize = 4_000_000;

/// Square skew-symmetric matrix over a coefficient ring.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Ring> SkewMatrix<T> {
    /// All-zero matrix; `zero` fixes the ring (and for polynomials the arity).
    pub fn zeros(n: usize, zero: &T) -> Self {
        SkewMatrix {
            n,
            entries: vec![zero.zero_like(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::Invalid("matrix is not square".into()));
            }
            entries.extend(row);
        }
        let m = SkewMatrix { n, entries };
        for i in 0..n {
            for j in i..n {
                if m.get(i, j) != &m.get(j, i).neg_ref() {
                    return Err(Error::NotSkew(i, j));
                }
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    /// Sets `m[i][j] = v` and `m[j][i] = -v`.
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        assert_ne!(i, j, "diagonal of a skew matrix is zero");
        self.entries[j * self.n + i] = v.neg_ref();
        self.entries[i * self.n + j] = v;
    }

    /// Adds `v` to `m[i][j]` (and `-v` to `m[j][i]`).
    pub fn add_at(&mut self, i: usize, j: usize, v: &T) {
        let cur = self.get(i, j).add_ref(v);
        self.set(i, j, cur);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        SkewMatrix {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a.add_ref(b))
                .collect(),
        }
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> SkewMatrix<U> {
        SkewMatrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries
            .chunks(self.n.max(1))
            .map(|c| c.to_vec())
            .collect()
    }
}

/// Pfaffian over any ring by memoized expansion along the lowest remaining
/// index: `Pf(S) = sum_k (-1)^(k-1) a[i][j_k] Pf(S minus {i, j_k})`.
pub fn pfaffian<T: Ring>(m: &SkewMatrix<T>) -> Result<T> {
    check_dim(m.n)?;
    let unit = match m.entries.first() {
        Some(x) => x.one_like(),
        None => return Err(Error::Invalid("empty matrix has no ring element".into())),
    };
    let nbrs: Vec<Vec<usize>> = (0..m.n)
        .map(|i| (0..m.n).filter(|&j| !m.get(i, j).is_zero_elem()).collect())
        .collect();
    let mut memo: HashMap<u64, T> = HashMap::new();
    let full = if m.n == 64 {
        u64::MAX
    } else {
        (1u64 << m.n) - 1
    };
    expand(m, &nbrs, full, &unit, &mut memo)
}

fn expand<T: Ring>(
    m: &SkewMatrix<T>,
    nbrs: &[Vec<usize>],
    mask: u64,
    unit: &T,
    memo: &mut HashMap<u64, T>,
) -> Result<T> {
    if mask == 0 {
        return Ok(unit.clone());
    }
    if let Some(v) = memo.get(&mask) {
        return Ok(v.clone());
    }
    if memo.len() > EXPANSION_STATE_LIMIT {
        return Err(Error::SizeLimit {
            what: "pfaffian expansion states",
            actual: memo.len(),
            limit: EXPANSION_STATE_LIMIT,
        });
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u64 << i);
    let mut acc = unit.zero_like();
    for &j in &nbrs[i] {
        if rest & (1u64 << j) == 0 {
            continue;
        }
        // position of j among the remaining indices above i
        let below = (rest & ((1u64 << j) - 1)).count_ones();
        let sub = expand(m, nbrs, rest & !(1u64 << j), unit, memo)?;
        if sub.is_zero_elem() {
            continue;
        }
        let term = m.get(i, j).mul_ref(&sub);
        acc = if below % 2 == 0 {
            acc.add_ref(&term)
        } else {
            acc.sub_ref(&term)
        };
    }
    memo.insert(mask, acc.clone());
    Ok(acc)
}

fn check_dim(n: usize) -> Result<()> {
    if n % 2 == 1 {
        return Err(Error::OddDimension(n));
    }
    if n > PFAFFIAN_MAX_DIM {
        return Err(Error::SizeLimit {
            what: "pfaffian dimension",
            actual: n,
            limit: PFAFFIAN_MAX_DIM,
        });
    }
    Ok(())
}

/// Pfaffian of a rational matrix: matching expansion up to
/// `COMBINATORIAL_PFAFFIAN_MAX`, congruence elimination above.
pub fn pfaffian_rational(m: &SkewMatrix<Rational>) -> Result<Rational> {
    check_dim(m.n)?;
    if m.n == 0 {
        return Ok(Rational::one());
    }
    if m.n <= COMBINATORIAL_PFAFFIAN_MAX {
        return pfaffian(m);
    }
    let n = m.n;
    let mut a = m.rows();
    let mut pf = Rational::one();
    let mut k = 0;
    while k < n {
        let Some(p) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return Ok(Rational::zero());
        };
        if p != k + 1 {
            swap_index(&mut a, k + 1, p);
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf *= &piv;
        for i in k + 2..n {
            // congruence row_i += c row_(k+1), col_i += c col_(k+1), then with k
            let c = -&a[k][i] / &piv;
            if !c.is_zero() {
                add_multiple(&mut a, i, k + 1, &c);
            }
            let d = &a[k + 1][i] / &piv;
            if !d.is_zero() {
                add_multiple(&mut a, i, k, &d);
            }
        }
        k += 2;
    }
    Ok(pf)
}

fn swap_index(a: &mut [Vec<Rational>], i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

fn add_multiple(a: &mut [Vec<Rational>], i: usize, src: usize, c: &Rational) {
    let n = a.len();
    for l in 0..n {
        let v = &a[src][l] * c;
        a[i][l] += v;
    }
    for l in 0..n {
        let v = &a[l][src] * c;
        a[l][i] += v;
    }
}

/// Determinant of a square rational matrix by Gaussian elimination.
pub fn determinant(rows: &[Vec<Rational>]) -> Rational {
    let n = rows.len();
    let mut a = rows.to_vec();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for l in c..n {
                let v = &a[c][l] * &f;
                a[r][l] -= v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, SparsePoly};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_skew(n: usize, rng: &mut ChaCha8Rng) -> SkewMatrix<Rational> {
        let mut m = SkewMatrix::zeros(n, &int(0));
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, rat(rng.gen_range(-5..=5), rng.gen_range(1..=4)));
            }
        }
        m
    }

    #[test]
    fn two_by_two_is_entry() {
        let a = SparsePoly::var(1, 0);
        let mut m = SkewMatrix::zeros(2, &a);
        m.set(0, 1, a.clone());
        assert_eq!(pfaffian(&m).unwrap(), a);
    }

    #[test]
    fn block_diagonal_is_one() {
        let mut m = SkewMatrix::zeros(4, &int(0));
        m.set(0, 1, int(1));
        m.set(2, 3, int(1));
        assert_eq!(pfaffian(&m).unwrap(), int(1));
    }

    #[test]
    fn odd_dimension_rejected() {
        let m = SkewMatrix::zeros(3, &int(0));
        assert_eq!(pfaffian(&m).unwrap_err(), Error::OddDimension(3));
    }

    #[test]
    fn not_skew_rejected() {
        let rows = vec![vec![int(0), int(1)], vec![int(1), int(0)]];
        assert_eq!(
            SkewMatrix::from_rows(rows).unwrap_err(),
            Error::NotSkew(0, 1)
        );
    }

    #[test]
    fn square_is_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in (2..=10).step_by(2) {
            for _ in 0..5 {
                let m = random_skew(n, &mut rng);
                let pf = pfaffian(&m).unwrap();
                assert_eq!(&pf * &pf, determinant(&m.rows()));
            }
        }
    }

    #[test]
    fn elimination_matches_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [18] {
            let m = random_skew(n, &mut rng);
            let by_elim = pfaffian_rational(&m).unwrap();
            assert_eq!(by_elim, pfaffian(&m).unwrap());
            assert_eq!(&by_elim * &by_elim, determinant(&m.rows()));
        }
    }
}
