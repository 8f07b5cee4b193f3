#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::One;
use spinduality::exact::{int, Rational};
use spinduality::graph::{generate, PlanarGraph};

pub const FIXTURES: [&str; 4] = ["theta", "k4", "prism3", "cube"];

pub fn fixture(name: &str) -> PlanarGraph {
    generate(name).expect("built-in generator")
}

pub fn uniform(g: &PlanarGraph, y: Rational) -> Vec<Rational> {
    vec![y; g.num_edges()]
}

pub fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * k)
}

/// `(J+1)! / prod (J - c_i)!` from factorials, `J = (a+b+c)/2`.
pub fn theta_delta_oracle(a: i64, b: i64, c: i64) -> Rational {
    let j = (a + b + c) / 2;
    Rational::new(
        factorial(j + 1),
        factorial(j - a) * factorial(j - b) * factorial(j - c),
    )
}

pub fn sign(n: i64) -> Rational {
    if n % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// Composite Gauss-Legendre quadrature, 20 nodes per panel.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = 20;
    let (nodes, weights) = legendre(n);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for i in 0..n {
            total += weights[i] * f(lo + 0.5 * h * (nodes[i] + 1.0)) * 0.5 * h;
        }
    }
    total
}

fn legendre_eval(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, n as f64 * (z * p1 - p0) / (z * z - 1.0))
}

fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_eval(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_eval(n, z);
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * dp * dp));
    }
    (x, w)
}

/// `F(phi | m)` by quadrature.
pub fn f_oracle(phi: f64, m: f64) -> f64 {
    quad(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 64)
}

/// `E(phi | m)` by quadrature.
pub fn e_oracle(phi: f64, m: f64) -> f64 {
    quad(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 64)
}
