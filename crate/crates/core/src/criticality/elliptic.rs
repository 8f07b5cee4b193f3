//! Complete elliptic integrals by the arithmetic-geometric mean and
//! incomplete ones by Carlson's symmetric forms. Arguments are moduli `k`
//! unless the name ends in `_m`, which takes the parameter `m = k^2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

const TOL: f64 = 4.0 * f64::EPSILON;
const MAX_STEPS: usize = 64;

/// `K(m)` for `m < 1` (negative parameters allowed).
pub fn complete_k_m(m: f64) -> Result<f64> {
    if !(m < 1.0) {
        return Err(Error::Domain(format!(
            "K diverges logarithmically at parameter {} >= 1",
            m
        )));
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    for _ in 0..MAX_STEPS {
        if (a - b).abs() <= TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    Ok(FRAC_PI_2 / a)
}

/// `E(m)` for `m <= 1`.
pub fn complete_e_m(m: f64) -> Result<f64> {
    if m == 1.0 {
        return Ok(1.0);
    }
    if !(m < 1.0) {
        return Err(Error::Domain(format!(
            "E is real only for parameter <= 1, got {}",
            m
        )));
    }
    let (mut a, mut b) = (1.0f64, (1.0 - m).sqrt());
    let mut sum = 0.5 * m;
    let mut pow = 0.5;
    for _ in 0..MAX_STEPS {
        if (a - b).abs() <= TOL * a {
            break;
        }
        let next = 0.5 * (a + b);
        let c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = next;
        pow *= 2.0;
        sum += pow * c * c;
    }
    // one more term so the last difference is counted
    let c = 0.5 * (a - b);
    sum += 2.0 * pow * c * c;
    Ok(FRAC_PI_2 / (0.5 * (a + b)) * (1.0 - sum))
}

pub fn agm_k(k: f64) -> Result<f64> {
    if !(k.abs() < 1.0) {
        return Err(Error::Domain(format!("K(k) needs |k| < 1, got {}", k)));
    }
    complete_k_m(k * k)
}

pub fn agm_e(k: f64) -> Result<f64> {
    if !(k.abs() <= 1.0) {
        return Err(Error::Domain(format!("E(k) needs |k| <= 1, got {}", k)));
    }
    complete_e_m(k * k)
}

/// Carlson's `R_F(x, y, z)`, at most one argument zero.
pub fn carlson_rf(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    for _ in 0..200 {
        let mu = (x + y + z) / 3.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0)
                / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    f64::NAN
}

/// Carlson's `R_D(x, y, z)`.
pub fn carlson_rd(x: f64, y: f64, z: f64) -> f64 {
    let (mut x, mut y, mut z) = (x, y, z);
    let mut sum = 0.0;
    let mut fac = 1.0;
    for _ in 0..200 {
        let mu = (x + y + 3.0 * z) / 5.0;
        let dx = 1.0 - x / mu;
        let dy = 1.0 - y / mu;
        let dz = 1.0 - z / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s = 1.0
                + ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 4.5 / 26.0 * dz * ee)
                + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + 3.0 / 26.0 * dz * ea));
            return 3.0 * sum + fac * s / (mu * mu.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        sum += fac / (sz * (z + lambda));
        fac *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    f64::NAN
}

fn check_phi(phi: f64, m: f64) -> Result<(f64, f64)> {
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&phi) {
        return Err(Error::Domain(format!(
            "amplitude {} outside [0, pi/2]",
            phi
        )));
    }
    let s = phi.sin();
    let delta = 1.0 - m * s * s;
    if !(delta > 0.0) && !(delta == 0.0 && phi < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "1 - m sin^2 phi = {} at m = {}",
            delta, m
        )));
    }
    Ok((s, delta))
}

/// `F(phi | m) = sin(phi) R_F(cos^2 phi, 1 - m sin^2 phi, 1)`.
pub fn incomplete_f_m(phi: f64, m: f64) -> Result<f64> {
    let (s, delta) = check_phi(phi, m)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let c = phi.cos();
    Ok(s * carlson_rf(c * c, delta, 1.0))
}

/// `E(phi | m) = F(phi | m) - m sin^3(phi) R_D(cos^2 phi, 1 - m sin^2 phi, 1) / 3`.
pub fn incomplete_e_m(phi: f64, m: f64) -> Result<f64> {
    let (s, delta) = check_phi(phi, m)?;
    if s == 0.0 {
        return Ok(0.0);
    }
    let c = phi.cos();
    let c2 = c * c;
    Ok(s * carlson_rf(c2, delta, 1.0) - m * s * s * s * carlson_rd(c2, delta, 1.0) / 3.0)
}

pub fn carlson_f(phi: f64, k: f64) -> Result<f64> {
    incomplete_f_m(phi, k * k)
}

pub fn carlson_e(phi: f64, k: f64) -> Result<f64> {
    incomplete_e_m(phi, k * k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Composite Gauss-Legendre, 20 points per panel.
    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
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

    fn legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        for i in 0..n {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            loop {
                let (mut p0, mut p1) = (1.0, z);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
                let dz = p1 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    let (mut q0, mut q1) = (1.0, z);
                    for k in 2..=n {
                        let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                        q0 = q1;
                        q1 = q2;
                    }
                    let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                    x[i] = z;
                    w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                    break;
                }
            }
        }
        (x, w)
    }

    fn f_oracle(phi: f64, m: f64) -> f64 {
        quad(|t| 1.0 / (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 64)
    }

    fn e_oracle(phi: f64, m: f64) -> f64 {
        quad(|t| (1.0 - m * t.sin().powi(2)).sqrt(), 0.0, phi, 64)
    }

    #[test]
    fn special_values() {
        assert!((agm_k(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!((agm_e(0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert_eq!(agm_e(1.0).unwrap(), 1.0);
        assert!(matches!(agm_k(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn complete_against_quadrature() {
        for i in 0..=100 {
            let k = 0.999 * i as f64 / 100.0;
            let m = k * k;
            // the substitution t = sin theta smooths the integrand near k = 1
            let kk = f_oracle(FRAC_PI_2, m);
            let ee = e_oracle(FRAC_PI_2, m);
            assert!((agm_k(k).unwrap() - kk).abs() < 1e-10, "K({})", k);
            assert!((agm_e(k).unwrap() - ee).abs() < 1e-10, "E({})", k);
        }
    }

    #[test]
    fn incomplete_against_quadrature() {
        for i in 0..=20 {
            let k = 0.999 * i as f64 / 20.0;
            for j in 0..=12 {
                let phi = FRAC_PI_2 * j as f64 / 12.0;
                let m = k * k;
                assert!((carlson_f(phi, k).unwrap() - f_oracle(phi, m)).abs() < 1e-10);
                assert!((carlson_e(phi, k).unwrap() - e_oracle(phi, m)).abs() < 1e-10);
            }
        }
        // negative parameter
        for m in [-0.5, -3.0, -20.0] {
            assert!((incomplete_f_m(1.0, m).unwrap() - f_oracle(1.0, m)).abs() < 1e-10);
            assert!((incomplete_e_m(1.0, m).unwrap() - e_oracle(1.0, m)).abs() < 1e-10);
        }
    }

    #[test]
    fn complete_limits_match_incomplete() {
        for k in [0.1, 0.5, 0.9] {
            assert!((carlson_f(FRAC_PI_2, k).unwrap() - agm_k(k).unwrap()).abs() < 1e-14);
            assert!((carlson_e(FRAC_PI_2, k).unwrap() - agm_e(k).unwrap()).abs() < 1e-14);
        }
    }
}
