//! Nearest-neighbour correlation and mean spin on the isotropic hexagonal
//! lattice.

use std::f64::consts::PI;
use std::io::Write;

use serde::Serialize;

use super::elliptic::{complete_e_m, complete_k_m, incomplete_e_m, incomplete_f_m};
use crate::error::{Error, Result};

/// Width of the band `|k - 1| < NEAR_CRITICAL` where the asymptotic forms
/// replace the complete integrals of modulus `k1 -> 1`.
pub const NEAR_CRITICAL: f64 = 1e-8;

pub const CSV_HEADER: &str = "y,g,mean_j_plus_half,dj_dbeta";
/// How the second argument of the incomplete integrals in `g(y)` is read.
pub const ELLIPTIC_CONVENTION: &str = "parameter m = 1 - k^2";

/// `L(y) = ln(cosh 3y / cosh y) / 4`.
fn big_l(y: f64) -> f64 {
    // cosh 3y / cosh y = 4 cosh^2 y - 3 = 2 cosh 2y - 1
    0.25 * (2.0 * (2.0 * y).cosh() - 1.0).ln()
}

/// `k(y) = 1 / (sinh 2L(y) sinh 2y)`.
pub fn hex_k(y: f64) -> f64 {
    1.0 / ((2.0 * big_l(y)).sinh() * (2.0 * y).sinh())
}

/// `(a(k), b(k))` with `k1 = 2 sqrt(k) / (1 + k)`.
fn ab(k: f64) -> Result<(f64, f64)> {
    let k1 = 2.0 * k.sqrt() / (1.0 + k);
    let m1 = k1 * k1;
    let (kk, ee) = if (k - 1.0).abs() < NEAR_CRITICAL {
        // K(k1) ~ ln(4 / k1'), k1' = |1 - k| / (1 + k)
        let comp = (1.0 - k).abs() / (1.0 + k);
        let kk = if comp == 0.0 { 0.0 } else { (4.0 / comp).ln() };
        (kk, 1.0)
    } else {
        (
            complete_k_m(m1.min(1.0 - f64::EPSILON))?,
            complete_e_m(m1.min(1.0))?,
        )
    };
    let a = ((1.0 + k) * ee + (1.0 - k) * kk) / PI;
    let b = 2.0 * (1.0 - k) * kk / PI;
    Ok((a, b))
}

/// One evaluation of the closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HexPoint {
    pub y: f64,
    pub k: f64,
    pub g: f64,
    pub mean_j_plus_half: f64,
    /// `d<2j>/d beta` at `beta = 1`, i.e. `y d<2j>/dy`, by central differences.
    pub dj_dbeta: f64,
    pub near_critical: bool,
}

/// `g(y) = coth(2L) (a(k) A(y) - b(k) B(y))` with
/// `A = F(phi | 1 - k^2)`, `B = (F - E)(phi | 1 - k^2) / (1 - k^2)` and
/// `phi = arctan sinh 2L`. The second argument is read as the parameter.
pub fn hex_g(y: f64) -> Result<f64> {
    if !(y > 0.0) || !y.is_finite() {
        return Err(Error::Domain(format!(
            "hexagonal correlation needs y > 0, got {}",
            y
        )));
    }
    let l = big_l(y);
    let k = hex_k(y);
    let (a, b) = ab(k)?;
    let phi = (2.0 * l).sinh().atan();
    let m = 1.0 - k * k;
    let f = incomplete_f_m(phi, m)?;
    let bb = if m.abs() < 1e-6 {
        // (F - E)/m -> integral of sin^2 / (1 - m sin^2)^(3/2) ... to first order in m
        let s = phi.sin();
        let c = phi.cos();
        let i2 = 0.5 * (phi - s * c);
        let i4 = (3.0 * phi - 3.0 * s * c - 2.0 * s * s * s * c) / 8.0;
        0.5 * i2 + 0.375 * m * i4
    } else {
        (f - incomplete_e_m(phi, m)?) / m
    };
    Ok((a * f - b * bb) / (2.0 * l).tanh())
}

/// `<j + 1/2> = (e^{2y} (1 - g) + e^{-2y} (1 + g)) / 4`.
pub fn hex_mean_j(y: f64) -> Result<f64> {
    let g = hex_g(y)?;
    Ok(0.25 * ((2.0 * y).exp() * (1.0 - g) + (-2.0 * y).exp() * (1.0 + g)))
}

pub fn hex_point(y: f64) -> Result<HexPoint> {
    let g = hex_g(y)?;
    let mean = 0.25 * ((2.0 * y).exp() * (1.0 - g) + (-2.0 * y).exp() * (1.0 + g));
    let yc = critical_y();
    let h = (1e-5 * y).min(0.25 * (y - yc).abs()).max(1e-9);
    let two_j = |x: f64| hex_mean_j(x).map(|v| 2.0 * v - 1.0);
    let deriv = (two_j(y + h)? - two_j(y - h)?) / (2.0 * h);
    let k = hex_k(y);
    Ok(HexPoint {
        y,
        k,
        g,
        mean_j_plus_half: mean,
        dj_dbeta: y * deriv,
        near_critical: (k - 1.0).abs() < NEAR_CRITICAL,
    })
}

/// Nearest-neighbour correlation from the free energy per site
/// `3/4 ln 2 + (1/16 pi^2) \int\int ln(c^3 + 1 - s^2 (cos a + cos b + cos(a+b)))`,
/// `c = cosh 2y`, `s = sinh 2y`, as `(2/3) d/dy`. The periodic integrand is
/// summed on an `n x n` grid (spectrally accurate away from `y_c`).
pub fn hex_g_free_energy(y: f64, n: usize) -> f64 {
    let c = (2.0 * y).cosh();
    let s = (2.0 * y).sinh();
    let h = 2.0 * PI / n as f64;
    let cos: Vec<f64> = (0..n).map(|i| (i as f64 * h).cos()).collect();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let sum = cos[i] + cos[j] + cos[(i + j) % n];
            let d = c * c * c + 1.0 - s * s * sum;
            let dd = 6.0 * c * c * s - 4.0 * s * c * sum;
            total += dd / d;
        }
    }
    (2.0 / 3.0) * total * h * h / (16.0 * PI * PI)
}

/// Root of `k(y) = 1` by bisection.
pub fn critical_y() -> f64 {
    let (mut lo, mut hi) = (0.1f64, 2.0f64);
    // k decreases through 1
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hex_k(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Pearson correlation between `d<2j>/d beta` and `ln|t|`, `t = 1 - y_c/y`,
/// on `samples` log-spaced points `|t|` in `[t_min, t_max]`, on each side of
/// the critical point. Returns `(below, above)`.
pub fn log_singularity_correlation(t_min: f64, t_max: f64, samples: usize) -> Result<(f64, f64)> {
    let yc = critical_y();
    let side = |sign: f64| -> Result<f64> {
        let mut xs = Vec::with_capacity(samples);
        let mut ds = Vec::with_capacity(samples);
        for i in 0..samples {
            let lt = t_min.ln() + (t_max / t_min).ln() * i as f64 / (samples - 1) as f64;
            let t = sign * lt.exp();
            xs.push(lt);
            ds.push(hex_point(yc / (1.0 - t))?.dj_dbeta);
        }
        Ok(pearson(&xs, &ds).abs())
    };
    Ok((side(-1.0)?, side(1.0)?))
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Points on the grid `from, from + step, ...` up to `to` inclusive.
pub fn emit_curve(from: f64, to: f64, step: f64) -> Result<Vec<HexPoint>> {
    if !(step > 0.0) || !(to >= from) {
        return Err(Error::Domain(format!(
            "bad grid {}..{} step {}",
            from, to, step
        )));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    // rounding keeps grid values like 0.06 free of accumulated noise
    (0..n)
        .map(|i| hex_point(((from + i as f64 * step) * 1e12).round() / 1e12))
        .collect()
}

pub fn write_curve_csv<W: Write>(out: &mut W, points: &[HexPoint]) -> std::io::Result<()> {
    writeln!(out, "{}", CSV_HEADER)?;
    for p in points {
        writeln!(out, "{},{},{},{}", p.y, p.g, p.mean_j_plus_half, p.dj_dbeta)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_point() {
        let yc = critical_y();
        assert!((yc.tanh() - 1.0 / 3f64.sqrt()).abs() < 1e-10);
        assert!((yc - 0.658).abs() < 1e-3);
    }

    #[test]
    fn log_singularity() {
        let (below, above) = log_singularity_correlation(1e-4, 1e-2, 40).unwrap();
        assert!(below > 0.99 && above > 0.99);
    }

    #[test]
    fn limits() {
        assert!((hex_mean_j(1e-3).unwrap() - 0.5).abs() < 1e-4);
        let y = 3.0f64;
        let r = hex_mean_j(y).unwrap() / ((1.0 - y.tanh()) / 4.0);
        assert!((0.95..=1.05).contains(&r), "{}", r);
        assert!(matches!(hex_g(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn free_energy_reference() {
        // high temperature: g = t + O(t^5) on the honeycomb
        let t = 0.1f64.tanh();
        assert!((hex_g_free_energy(0.1, 256) - t).abs() < 1e-4);
        assert!(hex_g_free_energy(3.0, 256) > 0.9999);
        // the closed form agrees with the reference deep in the ordered phase
        assert!((hex_g(3.0).unwrap() - hex_g_free_energy(3.0, 256)).abs() < 1e-6);
    }

    #[test]
    fn curve_grid() {
        let pts = emit_curve(0.05, 1.7, 0.01).unwrap();
        assert_eq!(pts.len(), 166);
        assert!(pts
            .iter()
            .all(|p| p.g.is_finite() && p.mean_j_plus_half.is_finite()));
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &pts[..2]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("y,g,mean_j_plus_half,dj_dbeta\n0.05,"));
        let yc = critical_y();
        assert!(hex_point(yc + 1e-9).unwrap().near_critical);
    }
}
