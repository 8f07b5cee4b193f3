mod common;

use spinduality::exact::{int, Rational};
use spinduality::wigner::{admissible, six_j, theta_delta, three_j};

use common::*;

// all arguments are doubled spins

#[test]
fn three_j_with_a_zero_spin() {
    // (j j 0; m -m 0) = (-1)^(j-m) / sqrt(2j+1)
    for tj in 0..=8 {
        for tm in (-tj..=tj).step_by(2) {
            let v = three_j(tj, tj, 0, tm, -tm, 0);
            let sign = sign((tj - tm) / 2);
            assert_eq!(
                v.square(),
                Rational::new((1).into(), (tj + 1).into()),
                "j={} m={}",
                tj,
                tm
            );
            assert_eq!(v.signum() as i64, if sign == int(1) { 1 } else { -1 });
        }
    }
}

#[test]
fn three_j_with_zero_projections() {
    // even J = j1+j2+j3 = 2g:
    // (-1)^g sqrt((2g-2j1)!(2g-2j2)!(2g-2j3)!/(2g+1)!) g!/((g-j1)!(g-j2)!(g-j3)!)
    for a in (0..=8).step_by(2) {
        for b in (0..=8).step_by(2) {
            for c in (0..=8).step_by(2) {
                if !admissible(a, b, c) {
                    continue;
                }
                let (j1, j2, j3) = (a / 2, b / 2, c / 2);
                let big_j = j1 + j2 + j3;
                let v = three_j(a, b, c, 0, 0, 0);
                if big_j % 2 == 1 {
                    assert!(v.is_zero());
                    continue;
                }
                let g = big_j / 2;
                let f = |n| factorial(n);
                let root = Rational::new(
                    f(big_j - 2 * j1) * f(big_j - 2 * j2) * f(big_j - 2 * j3),
                    f(big_j + 1),
                );
                let pre = Rational::new(f(g), f(g - j1) * f(g - j2) * f(g - j3));
                assert_eq!(v.square(), root * &pre * &pre, "{} {} {}", a, b, c);
                assert_eq!(v.signum() as i64, if g % 2 == 0 { 1 } else { -1 });
            }
        }
    }
}

#[test]
fn six_j_with_a_zero_spin() {
    // {a b c; 0 c b} = (-1)^(a+b+c) / sqrt((2b+1)(2c+1))
    for a in 0..=6 {
        for b in 0..=6 {
            for c in 0..=6 {
                if !admissible(a, b, c) {
                    continue;
                }
                let v = six_j(a, b, c, 0, c, b);
                assert_eq!(
                    v.square(),
                    Rational::new(1.into(), ((b + 1) * (c + 1)).into())
                );
                let s = (a + b + c) / 2;
                assert_eq!(v.signum() as i64, if s % 2 == 0 { 1 } else { -1 });
            }
        }
    }
}

#[test]
fn theta_delta_matches_factorials() {
    for a in 0..=6 {
        for b in 0..=6 {
            for c in 0..=6 {
                if admissible(a, b, c) {
                    assert_eq!(
                        Rational::from(theta_delta(a, b, c)),
                        theta_delta_oracle(a, b, c)
                    );
                }
            }
        }
    }
}

#[test]
fn inadmissible_triples_vanish() {
    assert!(!admissible(1, 1, 1));
    assert!(!admissible(0, 2, 4));
    assert!(three_j(1, 1, 1, 1, -1, 0).is_zero());
    assert!(six_j(0, 2, 4, 2, 2, 2).is_zero());
}
