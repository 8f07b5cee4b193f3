use num_traits::One;

use super::{Rational, SparsePoly};
use crate::error::{Error, Result};

/// Default total-degree cutoff for generating series.
pub const DEFAULT_DEGREE: u32 = 8;

/// Multivariate power series known up to (and including) total degree `cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    poly: SparsePoly,
    cutoff: u32,
}

impl TruncatedSeries {
    pub fn new(poly: &SparsePoly, cutoff: u32) -> Self {
        TruncatedSeries {
            poly: poly.truncate(cutoff),
            cutoff,
        }
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn poly(&self) -> &SparsePoly {
        &self.poly
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.poly.coeff(exps)
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let cutoff = self.cutoff.min(other.cutoff);
        TruncatedSeries {
            poly: self.poly.mul_truncated(&other.poly, cutoff),
            cutoff,
        }
    }

    pub fn mul_poly(&self, p: &SparsePoly) -> TruncatedSeries {
        TruncatedSeries {
            poly: self.poly.mul_truncated(p, self.cutoff),
            cutoff: self.cutoff,
        }
    }

    /// True when the series equals one up to its cutoff.
    pub fn is_one(&self) -> bool {
        self.poly.len() == 1 && self.poly.constant_term().is_one()
    }

    /// Sum of the series at a point, degree by degree: entry `d` holds the
    /// evaluation of the homogeneous part of degree `d`.
    pub fn graded_values(&self, point: &[Rational]) -> Vec<Rational> {
        let g = self.poly.graded_at(point);
        (0..=self.cutoff).map(|d| g.coeff(&[d])).collect()
    }
}

/// Computes `p^{-2}` up to total degree `cutoff`.
///
/// With `r = p^2 = 1 + r_1 + r_2 + ...` split into homogeneous parts, the
/// inverse `s` satisfies `s_d = -sum_{i=1..d} r_i s_{d-i}`.
pub fn series_inverse_square(p: &SparsePoly, cutoff: u32) -> Result<TruncatedSeries> {
    if !p.constant_term().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let n = p.nvars();
    let r = p.mul_truncated(p, cutoff);
    let r_parts: Vec<SparsePoly> = (0..=cutoff).map(|d| r.homogeneous_part(d)).collect();
    let mut s_parts: Vec<SparsePoly> = Vec::with_capacity(cutoff as usize + 1);
    s_parts.push(SparsePoly::one(n));
    for d in 1..=cutoff as usize {
        let mut acc = SparsePoly::zero(n);
        for i in 1..=d {
            if r_parts[i].is_zero() || s_parts[d - i].is_zero() {
                continue;
            }
            acc = &acc + &(&r_parts[i] * &s_parts[d - i]);
        }
        s_parts.push(acc.scale(&-Rational::one()));
    }
    let mut s = SparsePoly::zero(n);
    for part in &s_parts {
        s = &s + part;
    }
    debug_assert!(s.terms().all(|(e, _)| e.iter().sum::<u32>() <= cutoff));
    Ok(TruncatedSeries { poly: s, cutoff })
}
