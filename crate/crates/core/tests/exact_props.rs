use proptest::prelude::*;

use spinduality::exact::{
    determinant, int, parse_rational, pfaffian, rat, series_inverse_square, Rational, SkewMatrix,
    SparsePoly,
};

const NVARS: usize = 3;

fn small_rat() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| rat(n, d))
}

fn poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec((prop::collection::vec(0u32..3, NVARS), small_rat()), 0..6).prop_map(
        |terms| {
            let mut p = SparsePoly::zero(NVARS);
            for (m, c) in terms {
                p.add_term(m, c);
            }
            p
        },
    )
}

fn unit_poly() -> impl Strategy<Value = SparsePoly> {
    poly().prop_map(|p| {
        let c = p.constant_term();
        &(&p - &SparsePoly::constant(NVARS, c)) + &SparsePoly::one(NVARS)
    })
}

fn point() -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(small_rat(), NVARS)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) - &b, a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in poly(), b in poly(), x in point()) {
        prop_assert_eq!((&a * &b).eval(&x), a.eval(&x) * b.eval(&x));
        prop_assert_eq!((&a + &b).eval(&x), a.eval(&x) + b.eval(&x));
    }

    #[test]
    fn derivative_product_rule(a in poly(), b in poly(), v in 0usize..NVARS) {
        let lhs = (&a * &b).derivative(v);
        let rhs = &(&a.derivative(v) * &b) + &(&a * &b.derivative(v));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inverse_square_times_square_is_one(p in unit_poly(), d in 0u32..7) {
        let s = series_inverse_square(&p, d).unwrap();
        let check = s.poly().mul_truncated(&p.mul_truncated(&p, d), d);
        prop_assert_eq!(check, SparsePoly::one(NVARS));
    }

    #[test]
    fn canonical_text_is_stable(p in poly()) {
        let mut q = SparsePoly::zero(NVARS);
        for (m, c) in p.terms().collect::<Vec<_>>().into_iter().rev() {
            q.add_term(m.clone(), c.clone());
        }
        prop_assert_eq!(p.to_canonical_text(), q.to_canonical_text());
    }

    #[test]
    fn pfaffian_squared_is_determinant(vals in prop::collection::vec(small_rat(), 15), half in 1usize..4) {
        let n = 2 * half;
        let mut rows = vec![vec![int(0); n]; n];
        let mut it = vals.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let v = it.next().unwrap();
                rows[j][i] = -v.clone();
                rows[i][j] = v;
            }
        }
        let pf = pfaffian(&SkewMatrix::from_rows(rows.clone()).unwrap()).unwrap();
        prop_assert_eq!(&pf * &pf, determinant(&rows));
    }

    #[test]
    fn rationals_parse_back(n in -1000i64..1000, d in 1i64..1000) {
        let q = rat(n, d);
        prop_assert_eq!(parse_rational(&q.to_string()), Some(q));
    }
}

#[test]
fn pfaffian_of_odd_matrix_is_an_error() {
    let m = SkewMatrix::from_rows(vec![vec![int(0); 3]; 3]).unwrap();
    assert!(pfaffian(&m).is_err());
}

#[test]
fn inverse_square_needs_unit_constant() {
    let p = SparsePoly::constant(2, int(2));
    assert!(series_inverse_square(&p, 3).is_err());
}
