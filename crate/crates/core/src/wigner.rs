//! Exact Wigner 3j and 6j symbols from Racah's closed forms, plus the
//! orthogonality and recoupling identities.
//!
//! Every spin argument is passed doubled: `tj = 2j`, `tm = 2m`.

use std::collections::{BTreeMap, HashMap};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::exact::{QSqrt, RadicalSum, Rational};
use crate::report::Check;

/// Largest doubled spin accepted by the exact routines.
pub const MAX_TWO_J: i64 = 40;

const FACTORIAL_TABLE: usize = 4 * MAX_TWO_J as usize + 8;

fn factorials() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = vec![BigInt::one()];
        for n in 1..=FACTORIAL_TABLE {
            let next = &t[n - 1] * n;
            t.push(next);
        }
        t
    })
}

pub fn factorial(n: i64) -> BigInt {
    assert!(n >= 0, "factorial of negative {}", n);
    let n = n as usize;
    if n <= FACTORIAL_TABLE {
        factorials()[n].clone()
    } else {
        (1..=n).fold(BigInt::one(), |a, k| a * k)
    }
}

fn primes_upto(n: u64) -> Vec<u64> {
    (2..=n)
        .filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0))
        .collect()
}

/// Adds `sign * v_p(n!)` to `exps` for every prime `p <= n`.
fn add_factorial_exponents(exps: &mut BTreeMap<u64, i64>, n: i64, sign: i64) {
    for p in primes_upto(n as u64) {
        let mut k = 0i64;
        let mut q = p;
        while q <= n as u64 {
            k += (n as u64 / q) as i64;
            q *= p;
        }
        *exps.entry(p).or_insert(0) += sign * k;
    }
}

fn parity_sign(n: i64) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Halves an even doubled quantity.
fn half(n: i64) -> i64 {
    debug_assert!(n % 2 == 0, "odd doubled value {}", n);
    n / 2
}

/// Triangle condition on doubled spins, including integrality of the sum.
pub fn admissible(a: i64, b: i64, c: i64) -> bool {
    a >= 0 && b >= 0 && c >= 0 && (a + b + c) % 2 == 0 && c <= a + b && a <= b + c && b <= a + c
}

fn valid_m(tj: i64, tm: i64) -> bool {
    tm.abs() <= tj && (tj - tm) % 2 == 0
}

/// The theta evaluation `Delta = (J+1)! / ((J-a)!(J-b)!(J-c)!)`, `J = (a+b+c)/2`.
pub fn theta_delta(a: i64, b: i64, c: i64) -> BigInt {
    assert!(
        admissible(a, b, c),
        "inadmissible triad ({}, {}, {})",
        a,
        b,
        c
    );
    let j = half(a + b + c);
    factorial(j + 1) / (factorial(j - a) * factorial(j - b) * factorial(j - c))
}

/// Racah's `(a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!` as prime exponents.
fn triangle_exponents(exps: &mut BTreeMap<u64, i64>, a: i64, b: i64, c: i64) {
    add_factorial_exponents(exps, half(a + b - c), 1);
    add_factorial_exponents(exps, half(a - b + c), 1);
    add_factorial_exponents(exps, half(-a + b + c), 1);
    add_factorial_exponents(exps, half(a + b + c) + 1, -1);
}

/// Exact 3j symbol `(j1 j2 j3; m1 m2 m3)`.
pub fn three_j(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> QSqrt {
    if m1 + m2 + m3 != 0
        || !admissible(j1, j2, j3)
        || !valid_m(j1, m1)
        || !valid_m(j2, m2)
        || !valid_m(j3, m3)
    {
        return QSqrt::zero();
    }
    // integer spin units
    let (a, b, c) = (j1, j2, j3);
    let kmin = 0.max(half(b - c - m1)).max(half(a - c + m2));
    let kmax = half(a + b - c).min(half(a - m1)).min(half(b + m2));
    let mut sum = Rational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(half(c - b + m1) + k)
            * factorial(half(c - a - m2) + k)
            * factorial(half(a + b - c) - k)
            * factorial(half(a - m1) - k)
            * factorial(half(b + m2) - k);
        let term = Rational::new(BigInt::from(parity_sign(k)), den);
        sum += term;
    }
    if sum.is_zero() {
        return QSqrt::zero();
    }
    let mut exps = BTreeMap::new();
    triangle_exponents(&mut exps, a, b, c);
    for (j, m) in [(a, m1), (b, m2), (c, m3)] {
        add_factorial_exponents(&mut exps, half(j + m), 1);
        add_factorial_exponents(&mut exps, half(j - m), 1);
    }
    let phase = parity_sign(half(a - b - m3));
    QSqrt::from_prime_exponents(phase, &exps).scale(&sum)
}

/// Float 3j through a shared cache, for the tensor contraction route.
pub fn three_j_f64(j1: i64, j2: i64, j3: i64, m1: i64, m2: i64, m3: i64) -> f64 {
    static CACHE: OnceLock<RwLock<HashMap<[i64; 6], f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| RwLock::new(HashMap::new()));
    let key = [j1, j2, j3, m1, m2, m3];
    if let Some(v) = cache.read().unwrap().get(&key) {
        return *v;
    }
    let v = three_j(j1, j2, j3, m1, m2, m3).to_f64();
    cache.write().unwrap().insert(key, v);
    v
}

/// Exact 6j symbol `{j1 j2 j3; j4 j5 j6}` by Racah's single sum.
pub fn six_j(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64) -> QSqrt {
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| admissible(a, b, c)) {
        return QSqrt::zero();
    }
    let tri_sums: Vec<i64> = triads.iter().map(|&(a, b, c)| half(a + b + c)).collect();
    let quads = [
        half(j1 + j2 + j4 + j5),
        half(j2 + j3 + j5 + j6),
        half(j3 + j1 + j6 + j4),
    ];
    let tmin = *tri_sums.iter().max().unwrap();
    let tmax = *quads.iter().min().unwrap();
    let mut sum = Rational::zero();
    for t in tmin..=tmax {
        let mut den = BigInt::one();
        for s in &tri_sums {
            den *= factorial(t - s);
        }
        for q in &quads {
            den *= factorial(q - t);
        }
        sum += Rational::new(BigInt::from(parity_sign(t)) * factorial(t + 1), den);
    }
    if sum.is_zero() {
        return QSqrt::zero();
    }
    let mut exps = BTreeMap::new();
    for &(a, b, c) in &triads {
        triangle_exponents(&mut exps, a, b, c);
    }
    QSqrt::from_prime_exponents(1, &exps).scale(&sum)
}

fn m_range(tj: i64) -> impl Iterator<Item = i64> {
    (-tj..=tj).step_by(2)
}

/// `(-1)^(j - m)` for doubled arguments.
fn edge_sign(tj: i64, tm: i64) -> i32 {
    parity_sign(half(tj - tm))
}

/// The 6j symbol as the tetrahedral contraction of four 3j symbols.
pub fn six_j_by_contraction(j1: i64, j2: i64, j3: i64, j4: i64, j5: i64, j6: i64) -> QSqrt {
    let mut acc = RadicalSum::new();
    for m1 in m_range(j1) {
        for m2 in m_range(j2) {
            let m3 = -m1 - m2;
            if !valid_m(j3, m3) {
                continue;
            }
            for m5 in m_range(j5) {
                let m6 = m1 + m5;
                let m4 = m5 - m3;
                if !valid_m(j6, m6) || !valid_m(j4, m4) || -m2 - m6 + m4 != 0 {
                    continue;
                }
                let sign = edge_sign(j1, m1)
                    * edge_sign(j2, m2)
                    * edge_sign(j3, m3)
                    * edge_sign(j4, m4)
                    * edge_sign(j5, m5)
                    * edge_sign(j6, m6);
                let a = three_j(j1, j2, j3, m1, m2, m3);
                if a.is_zero() {
                    continue;
                }
                let b = three_j(j1, j5, j6, -m1, -m5, m6);
                let c = three_j(j3, j4, j5, -m3, -m4, m5);
                let d = three_j(j2, j6, j4, -m2, -m6, m4);
                let term = &(&(&a * &b) * &c) * &d;
                acc.add(&term.scale(&Rational::from_integer(sign.into())));
            }
        }
    }
    acc.to_qsqrt()
        .expect("tetrahedral contraction terms share one radical")
}

/// Orthogonality, completeness, and the signed orthogonality used to remove
/// bubbles, for all doubled spins `j1, j2 <= max_two_j`.
pub fn check_orthogonality(max_two_j: i64) -> Vec<Check> {
    let mut ortho = Check::new("3j orthogonality");
    let mut complete = Check::new("3j completeness");
    let mut signed = Check::new("signed orthogonality");
    for j1 in 0..=max_two_j {
        for j2 in 0..=max_two_j {
            let js: Vec<i64> = ((j1 - j2).abs()..=j1 + j2).step_by(2).collect();
            // orthogonality over (j, m), (j', m') in the coupled range
            for &j in &js {
                for &jp in &js {
                    for m in m_range(j) {
                        for mp in m_range(jp) {
                            let mut plain = RadicalSum::new();
                            let mut sgn = RadicalSum::new();
                            for m1 in m_range(j1) {
                                let m2 = -m - m1;
                                let m2p = -mp - m1;
                                if !valid_m(j2, m2) || m2 != m2p {
                                    continue;
                                }
                                let a = three_j(j1, j2, j, m1, m2, m);
                                let b = three_j(j1, j2, jp, m1, m2, mp);
                                plain.add(&(&a * &b));
                                // (j2 j1 j; -m2 -m1 -m)(j1 j2 j'; m1 m2 m')
                                let phase = parity_sign(
                                    half(j1 - m1)
                                        + half(j2 - m2)
                                        + half(j - m)
                                        + half(j1 + j2 + jp),
                                );
                                let c = three_j(j2, j1, j, -m2, -m1, -m);
                                sgn.add(&(&c * &b).scale(&Rational::from_integer(phase.into())));
                            }
                            let expect = if j == jp && m == mp {
                                Rational::new(BigInt::one(), BigInt::from(j + 1))
                            } else {
                                Rational::zero()
                            };
                            let want = QSqrt::from_rational(expect.clone());
                            ortho.record(plain.to_qsqrt() == Some(want.clone()), || {
                                format!("j1={} j2={} j={} m={} j'={} m'={}", j1, j2, j, m, jp, mp)
                            });
                            signed.record(sgn.to_qsqrt() == Some(want), || {
                                format!("j1={} j2={} j={} m={} j'={} m'={}", j1, j2, j, m, jp, mp)
                            });
                        }
                    }
                }
            }
            // completeness over (m1, m2), (m1', m2')
            for m1 in m_range(j1) {
                for m2 in m_range(j2) {
                    for m1p in m_range(j1) {
                        for m2p in m_range(j2) {
                            let mut acc = RadicalSum::new();
                            for &j in &js {
                                let m = -m1 - m2;
                                if -m1p - m2p != m || !valid_m(j, m) {
                                    continue;
                                }
                                let a = three_j(j1, j2, j, m1, m2, m);
                                let b = three_j(j1, j2, j, m1p, m2p, m);
                                acc.add(&(&a * &b).scale(&Rational::from_integer((j + 1).into())));
                            }
                            let expect = if m1 == m1p && m2 == m2p { 1 } else { 0 };
                            complete.record(
                                acc.to_qsqrt()
                                    == Some(QSqrt::from_rational(Rational::from_integer(
                                        expect.into(),
                                    ))),
                                || {
                                    format!(
                                        "j1={} j2={} m1={} m2={} m1'={} m2'={}",
                                        j1, j2, m1, m2, m1p, m2p
                                    )
                                },
                            );
                        }
                    }
                }
            }
        }
    }
    vec![ortho, complete, signed]
}

/// Left and right sides of the edge recoupling identity for one assignment of
/// doubled spins and magnetic numbers. `with_sign` controls the `(-1)^(2 j1)`
/// factor on the right.
pub fn whitehead_sides(
    [j1, j2, j3, j, j12]: [i64; 5],
    [m1, m2, m3, m]: [i64; 4],
    with_sign: bool,
) -> (RadicalSum, RadicalSum) {
    let mut lhs = RadicalSum::new();
    let m12 = -m1 - m2;
    if valid_m(j12, m12) {
        let a = three_j(j1, j12, j2, m1, m12, m2);
        let b = three_j(j12, j, j3, -m12, m, m3);
        lhs.add(&(&a * &b).scale(&Rational::from_integer(edge_sign(j12, m12).into())));
    }
    let mut rhs = RadicalSum::new();
    let lead = if with_sign { parity_sign(j1) } else { 1 };
    let total = j1 + j2 + j3 + j;
    if total % 2 != 0 {
        return (lhs, rhs);
    }
    let outer = lead * parity_sign(half(total));
    let m23 = m1 + m;
    for j23 in 0..=(j1 + j).max(j2 + j3) {
        if !valid_m(j23, m23) {
            continue;
        }
        let sixj = six_j(j1, j2, j12, j3, j, j23);
        if sixj.is_zero() {
            continue;
        }
        let a = three_j(j1, j, j23, m1, m, -m23);
        let b = three_j(j2, j23, j3, m2, m23, m3);
        let coeff =
            Rational::from_integer(((j23 + 1) * (outer * edge_sign(j23, m23)) as i64).into());
        rhs.add(&(&(&sixj * &a) * &b).scale(&coeff));
    }
    (lhs, rhs)
}

/// Exhaustive recoupling check over all doubled spins `<= max_two_j`.
/// Returns the check and the number of cases with a nonzero side.
pub fn check_whitehead(max_two_j: i64, with_sign: bool) -> (Check, usize) {
    let mut check = Check::new(if with_sign {
        "recoupling identity"
    } else {
        "recoupling identity without (-1)^2j1"
    });
    let mut nonzero = 0;
    let r = max_two_j;
    for j1 in 0..=r {
        for j2 in 0..=r {
            for j12 in 0..=r {
                if !admissible(j1, j12, j2) {
                    continue;
                }
                for j3 in 0..=r {
                    for j in 0..=r {
                        if !admissible(j12, j, j3) {
                            continue;
                        }
                        for m1 in m_range(j1) {
                            for m2 in m_range(j2) {
                                for m3 in m_range(j3) {
                                    for m in m_range(j) {
                                        let (l, rr) = whitehead_sides(
                                            [j1, j2, j3, j, j12],
                                            [m1, m2, m3, m],
                                            with_sign,
                                        );
                                        if !l.is_zero() || !rr.is_zero() {
                                            nonzero += 1;
                                        }
                                        check.record(l == rr, || {
                                            format!(
                                                "2j=({},{},{},{},{}) 2m=({},{},{},{}): {:?} vs {:?}",
                                                j1, j2, j3, j, j12, m1, m2, m3, m, l, rr
                                            )
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    (check, nonzero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use num_bigint::BigUint;

    fn q(r: Rational, rad: u32) -> QSqrt {
        QSqrt::new(r, BigUint::from(rad))
    }

    #[test]
    fn half_half_zero() {
        assert_eq!(three_j(1, 1, 0, 1, -1, 0), q(rat(1, 2), 2));
        assert_eq!(three_j(1, 1, 0, -1, 1, 0), q(rat(-1, 2), 2));
    }

    #[test]
    fn j_j_zero_closed_form() {
        for tj in 0..=6 {
            for tm in m_range(tj) {
                let sign = parity_sign(half(tj - tm));
                let expect = QSqrt::sqrt_of(&rat(1, tj + 1))
                    .unwrap()
                    .scale(&int(sign as i64));
                assert_eq!(three_j(tj, tj, 0, tm, -tm, 0), expect);
            }
        }
    }

    #[test]
    fn m_sum_selection() {
        assert!(three_j(2, 2, 2, 2, 0, 0).is_zero());
        assert!(three_j(2, 2, 6, 0, 0, 0).is_zero());
    }

    #[test]
    fn symmetries() {
        for a in 0..=4 {
            for b in 0..=4 {
                for c in 0..=4 {
                    if !admissible(a, b, c) {
                        continue;
                    }
                    let phase = int(parity_sign(half(a + b + c)) as i64);
                    for ma in m_range(a) {
                        for mb in m_range(b) {
                            let mc = -ma - mb;
                            if !valid_m(c, mc) {
                                continue;
                            }
                            let v = three_j(a, b, c, ma, mb, mc);
                            assert_eq!(v, three_j(b, c, a, mb, mc, ma));
                            assert_eq!(v, three_j(a, c, b, ma, mc, mb).scale(&phase));
                            assert_eq!(v, three_j(a, b, c, -ma, -mb, -mc).scale(&phase));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn six_j_values() {
        assert_eq!(six_j(2, 2, 2, 2, 2, 2), QSqrt::from_rational(rat(1, 6)));
        assert!(six_j(2, 2, 6, 2, 2, 2).is_zero());
        // {1/2 1/2 0; 1/2 1/2 0} = -1/2
        assert_eq!(six_j(1, 1, 0, 1, 1, 0), QSqrt::from_rational(rat(-1, 2)));
    }

    #[test]
    fn six_j_two_routes() {
        for a in 0..=3 {
            for b in 0..=3 {
                for c in 0..=3 {
                    for d in 0..=3 {
                        for e in 0..=3 {
                            for f in 0..=3 {
                                assert_eq!(
                                    six_j(a, b, c, d, e, f),
                                    six_j_by_contraction(a, b, c, d, e, f),
                                    "{:?}",
                                    (a, b, c, d, e, f)
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn theta_delta_values() {
        assert_eq!(theta_delta(1, 1, 0), BigInt::from(2));
        assert_eq!(theta_delta(2, 2, 0), BigInt::from(3));
        assert_eq!(theta_delta(2, 2, 2), BigInt::from(24));
    }

    #[test]
    fn orthogonality_small() {
        for c in check_orthogonality(2) {
            assert!(c.passed, "{}", c);
        }
        assert!(check_orthogonality(-1)
            .iter()
            .all(|c| c.passed && c.cases == 0));
    }

    #[test]
    fn recoupling_needs_the_sign() {
        let (with, nonzero) = check_whitehead(1, true);
        assert!(with.passed, "{}", with);
        assert!(nonzero > 0);
        let (without, _) = check_whitehead(1, false);
        assert!(!without.passed);
    }
}
