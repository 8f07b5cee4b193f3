//! Stationary-point geometry of the coherent-state weights, isoradial
//! critical couplings, and the hexagonal lattice nearest-neighbour
//! correlation in closed form.

pub mod elliptic;
mod hex;

pub use hex::{
    critical_y, emit_curve, hex_g, hex_g_free_energy, hex_k, hex_mean_j, hex_point,
    log_singularity_correlation, write_curve_csv, HexPoint, CSV_HEADER, ELLIPTIC_CONVENTION,
    NEAR_CRITICAL,
};

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::PlanarGraph;

/// Euclidean triangle with sides `l` (the distinguished one), `l1`, `l2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleGeometry {
    pub l: f64,
    pub l1: f64,
    pub l2: f64,
    pub half_perimeter: f64,
    pub area: f64,
    pub inradius: f64,
    /// Angle opposite `l`.
    pub gamma: f64,
}

impl TriangleGeometry {
    pub fn new(l: f64, l1: f64, l2: f64) -> Result<Self> {
        let sides = [l, l1, l2];
        let big = l.max(l1).max(l2);
        let ok = sides.iter().all(|s| s.is_finite() && *s > 0.0) && 2.0 * big < l + l1 + l2;
        if !ok {
            return Err(Error::DegenerateTriangle(sides));
        }
        let half = 0.5 * (l + l1 + l2);
        let a2 = half * (half - l) * (half - l1) * (half - l2);
        if !(a2 > 0.0) {
            return Err(Error::DegenerateTriangle(sides));
        }
        let area = a2.sqrt();
        let cos = (l1 * l1 + l2 * l2 - l * l) / (2.0 * l1 * l2);
        Ok(TriangleGeometry {
            l,
            l1,
            l2,
            half_perimeter: half,
            area,
            inradius: area / half,
            gamma: cos.clamp(-1.0, 1.0).acos(),
        })
    }

    /// `tan(gamma/2) = sin gamma / (1 + cos gamma)` with the Heron forms
    /// `sin gamma = 2A/(l1 l2)` and `1 + cos gamma = 2L(L-l)/(l1 l2)`.
    pub fn half_tangent(&self) -> f64 {
        let sin = 2.0 * self.area / (self.l1 * self.l2);
        let one_plus_cos =
            2.0 * self.half_perimeter * (self.half_perimeter - self.l) / (self.l1 * self.l2);
        sin / one_plus_cos
    }

    /// `(J - 2j_1)(J - 2j_2) / (J (J - 2j))` with `J` the sum of the spins
    /// (half the perimeter) and `2j` the side lengths.
    pub fn ratio_factor(&self) -> f64 {
        let j = self.half_perimeter;
        (j - self.l1) * (j - self.l2) / (j * (j - self.l))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StationaryCoupling {
    /// `Y_e = (tan(gamma_s/2) tan(gamma_t/2))^(1/2)`.
    pub tangent: f64,
    /// `Y_e` from the fourth-power ratio form.
    pub ratio: f64,
    pub gamma_source: f64,
    pub gamma_target: f64,
}

/// Agreement required between the tangent and the ratio forms.
pub const FORM_TOLERANCE: f64 = 1e-12;

/// Stationary coupling of one edge from the triangles at its two ends.
pub fn stationary_pair(
    source: &TriangleGeometry,
    target: &TriangleGeometry,
) -> Result<StationaryCoupling> {
    if (source.l - target.l).abs() > 1e-12 * source.l.max(target.l) {
        return Err(Error::Invalid(format!(
            "adjacent triangles disagree on the shared side: {} vs {}",
            source.l, target.l
        )));
    }
    let tangent = (source.half_tangent() * target.half_tangent()).sqrt();
    let ratio = (source.ratio_factor() * target.ratio_factor())
        .sqrt()
        .sqrt();
    if (tangent - ratio).abs() > FORM_TOLERANCE * tangent.max(1.0) {
        return Err(Error::Invalid(format!(
            "tangent form {} and ratio form {} disagree",
            tangent, ratio
        )));
    }
    Ok(StationaryCoupling {
        tangent,
        ratio,
        gamma_source: source.gamma,
        gamma_target: target.gamma,
    })
}

/// Triangle dual to vertex `v` with edge `e` distinguished.
pub fn vertex_triangle(
    g: &PlanarGraph,
    lengths: &[f64],
    v: usize,
    e: usize,
) -> Result<TriangleGeometry> {
    let hs = g.vertex_halves(v);
    let i = hs
        .iter()
        .position(|&h| g.edge_of(h) == e)
        .ok_or_else(|| Error::Invalid(format!("edge {} does not meet vertex {}", e, v)))?;
    let l1 = lengths[g.edge_of(hs[(i + 1) % 3])];
    let l2 = lengths[g.edge_of(hs[(i + 2) % 3])];
    TriangleGeometry::new(lengths[e], l1, l2)
}

/// Critical couplings of a whole graph whose edges carry lengths `2 j_e`.
pub fn stationary_couplings(g: &PlanarGraph, lengths: &[f64]) -> Result<Vec<StationaryCoupling>> {
    if lengths.len() != g.num_edges() {
        return Err(Error::ColoringLength {
            expected: g.num_edges(),
            actual: lengths.len(),
        });
    }
    (0..g.num_edges())
        .map(|e| {
            let (s, t) = g.edge_endpoints(e);
            stationary_pair(
                &vertex_triangle(g, lengths, s, e)?,
                &vertex_triangle(g, lengths, t, e)?,
            )
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IsoradialCoupling {
    pub theta: f64,
    /// `tanh y_c` from `e^{2 y_c} = (1 + sin theta) / cos theta`.
    pub from_exponential: f64,
    /// `tan(theta / 2)`.
    pub half_tangent: f64,
}

/// Critical coupling for half-rhombus angle `theta`.
pub fn isoradial_check(theta: f64) -> Result<IsoradialCoupling> {
    if !(theta > 0.0 && theta < FRAC_PI_2) {
        return Err(Error::Domain(format!(
            "half-rhombus angle {} outside (0, pi/2)",
            theta
        )));
    }
    let e2y = (1.0 + theta.sin()) / theta.cos();
    let from_exponential = (e2y - 1.0) / (e2y + 1.0);
    let half_tangent = (theta / 2.0).tan();
    if (from_exponential - half_tangent).abs() > FORM_TOLERANCE {
        return Err(Error::Invalid(format!(
            "{} vs {}",
            from_exponential, half_tangent
        )));
    }
    Ok(IsoradialCoupling {
        theta,
        from_exponential,
        half_tangent,
    })
}

/// Parse triangle pairs, one per line: `l s1 s2 t1 t2` (shared side, the
/// other two sides at the source, the other two at the target). `#` starts
/// a comment.
pub fn parse_triangle_pairs(text: &str) -> Result<Vec<(TriangleGeometry, TriangleGeometry)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|w| w.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: i + 1,
                msg: e.to_string(),
            })?;
        if nums.len() != 5 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 5 side lengths, found {}", nums.len()),
            });
        }
        out.push((
            TriangleGeometry::new(nums[0], nums[1], nums[2])?,
            TriangleGeometry::new(nums[0], nums[3], nums[4])?,
        ));
    }
    Ok(out)
}
