//! Spin network evaluations: the 3j tensor contraction, its integral,
//! unitary and skein normalizations, the generating series `Z^Spin`, the
//! comparison with the series coefficients, and the Whitehead move.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{
    rat, series_inverse_square, to_f64, QSqrt, Rational, SparsePoly, TruncatedSeries,
};
use crate::graph::{Orientation, PlanarGraph};
use crate::ising::p_gamma;
use crate::kasteleyn::is_kasteleyn;
use crate::report::ser_rational;
use crate::wigner::{self, three_j_f64, MAX_TWO_J};

/// Per-symbol error budget for floating 3j values.
pub const THREE_J_BUDGET: f64 = 1e-12;

/// Colors `c_e = 2 j_e`, indexed by edge.
pub type Coloring = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Tensor,
    Integral,
    Unitary,
    Skein,
}

impl FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tensor" => Ok(Normalization::Tensor),
            "integral" => Ok(Normalization::Integral),
            "unitary" => Ok(Normalization::Unitary),
            "skein" => Ok(Normalization::Skein),
            _ => Err(Error::Invalid(format!("unknown normalization `{}`", s))),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Normalization::Tensor => "tensor",
            Normalization::Integral => "integral",
            Normalization::Unitary => "unitary",
            Normalization::Skein => "skein",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationResult {
    pub value: f64,
    pub error_bound: f64,
    /// Exact value when it came from the series.
    #[serde(serialize_with = "ser_opt_rational")]
    pub exact: Option<Rational>,
    pub normalization: Normalization,
}

fn ser_opt_rational<S: serde::Serializer>(
    v: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_some(&q.to_string()),
        None => s.serialize_none(),
    }
}

/// `J_v`, half the color sum at each vertex.
pub fn vertex_sums(g: &PlanarGraph, col: &[u32]) -> Vec<u32> {
    (0..g.num_vertices())
        .map(|v| {
            g.vertex_halves(v)
                .iter()
                .map(|&h| col[g.edge_of(h)])
                .sum::<u32>()
                / 2
        })
        .collect()
}

pub fn check_coloring(g: &PlanarGraph, col: &[u32]) -> Result<()> {
    if col.len() != g.num_edges() {
        return Err(Error::ColoringLength {
            expected: g.num_edges(),
            actual: col.len(),
        });
    }
    for v in 0..g.num_vertices() {
        let [a, b, c] = g.vertex_halves(v).map(|h| col[g.edge_of(h)] as i64);
        if !wigner::admissible(a, b, c) {
            return Err(Error::InadmissibleColoring(g.vertex_label(v) as usize));
        }
    }
    Ok(())
}

pub fn is_admissible(g: &PlanarGraph, col: &[u32]) -> bool {
    check_coloring(g, col).is_ok()
}

/// A dense real tensor over edge variables, row-major in `vars` order.
#[derive(Clone, Debug)]
struct Factor {
    vars: Vec<usize>,
    data: Vec<f64>,
}

fn eliminate(factors: Vec<Factor>, dims: &[usize]) -> f64 {
    let mut factors = factors;
    let mut live: Vec<usize> = {
        let mut v: Vec<usize> = factors
            .iter()
            .flat_map(|f| f.vars.iter().copied())
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    };
    while !live.is_empty() {
        // greedy minimum degree, ties by edge id
        let degree = |x: usize| {
            let mut nb: Vec<usize> = factors
                .iter()
                .filter(|f| f.vars.contains(&x))
                .flat_map(|f| f.vars.iter().copied())
                .filter(|&y| y != x)
                .collect();
            nb.sort_unstable();
            nb.dedup();
            nb.len()
        };
        let x = *live.iter().min_by_key(|&&x| (degree(x), x)).unwrap();
        let (touching, rest): (Vec<Factor>, Vec<Factor>) =
            factors.into_iter().partition(|f| f.vars.contains(&x));
        factors = rest;
        factors.push(sum_product(&touching, x, dims));
        live.retain(|&y| y != x);
    }
    factors.iter().map(|f| f.data[0]).product()
}

/// Multiplies `fs` and sums out `x`.
fn sum_product(fs: &[Factor], x: usize, dims: &[usize]) -> Factor {
    let mut all: Vec<usize> = fs.iter().flat_map(|f| f.vars.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    let out_vars: Vec<usize> = all.iter().copied().filter(|&y| y != x).collect();
    let pos: BTreeMap<usize, usize> = all.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let strides: Vec<Vec<(usize, usize)>> = fs
        .iter()
        .map(|f| {
            let mut stride = 1;
            let mut s = vec![(0, 0); f.vars.len()];
            for (k, &v) in f.vars.iter().enumerate().rev() {
                s[k] = (pos[&v], stride);
                stride *= dims[v];
            }
            s
        })
        .collect();
    let out_size: usize = out_vars.iter().map(|&v| dims[v]).product();
    let mut out = vec![0.0; out_size.max(1)];
    let mut idx = vec![0usize; all.len()];
    let total: usize = all.iter().map(|&v| dims[v]).product();
    for _ in 0..total {
        let mut p = 1.0;
        for (f, s) in fs.iter().zip(&strides) {
            let off: usize = s.iter().map(|&(i, st)| idx[i] * st).sum();
            p *= f.data[off];
            if p == 0.0 {
                break;
            }
        }
        if p != 0.0 {
            let mut o = 0;
            for (k, &v) in all.iter().enumerate() {
                if v != x {
                    o = o * dims[v] + idx[k];
                }
            }
            out[o] += p;
        }
        // odometer, last index fastest
        for k in (0..all.len()).rev() {
            idx[k] += 1;
            if idx[k] < dims[all[k]] {
                break;
            }
            idx[k] = 0;
        }
    }
    Factor {
        vars: out_vars,
        data: out,
    }
}

/// `s(Gamma, {j_e}, o)`: sum over magnetic numbers of `prod_e (-1)^(j_e - m_e)`
/// times one 3j symbol per vertex, read in ccw order, with `+m_e` at the
/// source of `e` and `-m_e` at its target.
pub fn evaluate_tensor(g: &PlanarGraph, o: &Orientation, col: &[u32]) -> Result<EvaluationResult> {
    check_coloring(g, col)?;
    if let Some(&c) = col.iter().max() {
        if c as i64 > MAX_TWO_J {
            return Err(Error::SizeLimit {
                what: "color",
                actual: c as usize,
                limit: MAX_TWO_J as usize,
            });
        }
    }
    let dims: Vec<usize> = col.iter().map(|&c| c as usize + 1).collect();
    let mut factors = Vec::with_capacity(g.num_vertices());
    for v in 0..g.num_vertices() {
        let hs = g.vertex_halves(v);
        let es = hs.map(|h| g.edge_of(h));
        let eps: [i64; 3] = hs.map(|h| {
            if g.source_half(o, g.edge_of(h)) == h {
                1
            } else {
                -1
            }
        });
        let c = es.map(|e| col[e] as i64);
        let mut data = Vec::with_capacity(dims[es[0]] * dims[es[1]] * dims[es[2]]);
        for i0 in 0..=c[0] {
            for i1 in 0..=c[1] {
                for i2 in 0..=c[2] {
                    let tm = [2 * i0 - c[0], 2 * i1 - c[1], 2 * i2 - c[2]];
                    let mut x = three_j_f64(
                        c[0],
                        c[1],
                        c[2],
                        eps[0] * tm[0],
                        eps[1] * tm[1],
                        eps[2] * tm[2],
                    );
                    for k in 0..3 {
                        if eps[k] == 1 && (c[k] - tm[k]) / 2 % 2 == 1 {
                            x = -x;
                        }
                    }
                    data.push(x);
                }
            }
        }
        factors.push(Factor {
            vars: es.to_vec(),
            data,
        });
    }
    let value = eliminate(factors, &dims);
    let terms: f64 = dims.iter().map(|&d| d as f64).product();
    Ok(EvaluationResult {
        value,
        error_bound: THREE_J_BUDGET * g.num_vertices() as f64 * terms + f64::EPSILON * terms,
        exact: None,
        normalization: Normalization::Tensor,
    })
}

/// `sqrt(prod_v (J_v+1)! / prod_{e at v} (J_v - c_e)!)`.
pub fn integral_factor(g: &PlanarGraph, col: &[u32]) -> QSqrt {
    let sums = vertex_sums(g, col);
    let mut num = Rational::one();
    for v in 0..g.num_vertices() {
        let j = sums[v] as i64;
        let mut q = Rational::from_integer(wigner::factorial(j + 1));
        for h in g.vertex_halves(v) {
            q /= Rational::from_integer(wigner::factorial(j - col[g.edge_of(h)] as i64));
        }
        num *= q;
    }
    QSqrt::sqrt_of(&num).expect("factorial ratio is positive")
}

/// `prod_e c_e! / prod_alpha j_alpha!` with `j_alpha = J_v - c_opposite`, the
/// strand count through the corner.
pub fn skein_factor(g: &PlanarGraph, col: &[u32]) -> Rational {
    let sums = vertex_sums(g, col);
    let mut q = Rational::one();
    for &c in col {
        q *= Rational::from_integer(wigner::factorial(c as i64));
    }
    for a in g.angles() {
        let hs = g.vertex_halves(a.vertex);
        let opposite = hs
            .iter()
            .find(|&&h| h != a.s_half && h != a.t_half)
            .unwrap();
        let ja = sums[a.vertex] as i64 - col[g.edge_of(*opposite)] as i64;
        q /= Rational::from_integer(wigner::factorial(ja));
    }
    q
}

/// `(-1)^(sum_v J_v / 2)`; `sum_v J_v` equals the total color.
pub fn unitary_sign(col: &[u32]) -> Result<f64> {
    let total: u64 = col.iter().map(|&c| c as u64).sum();
    if total % 2 == 1 {
        return Err(Error::FractionalSign(total));
    }
    Ok(if (total / 2) % 2 == 0 { 1.0 } else { -1.0 })
}

/// Converts between normalizations of the same coloring.
pub fn convert(
    r: &EvaluationResult,
    g: &PlanarGraph,
    col: &[u32],
    target: Normalization,
) -> Result<EvaluationResult> {
    check_coloring(g, col)?;
    let int = integral_factor(g, col).to_f64();
    let skein = to_f64(&skein_factor(g, col));
    // factor taking a tensor value to each normalization
    let from_tensor = |n: Normalization| -> Result<f64> {
        Ok(match n {
            Normalization::Tensor => 1.0,
            Normalization::Integral => int,
            Normalization::Unitary => unitary_sign(col)?,
            Normalization::Skein => int * skein,
        })
    };
    let ratio = from_tensor(target)? / from_tensor(r.normalization)?;
    let exact = match (&r.exact, r.normalization, target) {
        (Some(q), a, b) if a == b => Some(q.clone()),
        (Some(q), Normalization::Integral, Normalization::Skein) => Some(q * skein_factor(g, col)),
        (Some(q), Normalization::Skein, Normalization::Integral) => Some(q / skein_factor(g, col)),
        _ => None,
    };
    Ok(EvaluationResult {
        value: r.value * ratio,
        error_bound: r.error_bound * ratio.abs(),
        exact,
        normalization: target,
    })
}

pub fn to_integral(r: &EvaluationResult, g: &PlanarGraph, col: &[u32]) -> Result<EvaluationResult> {
    convert(r, g, col, Normalization::Integral)
}

pub fn to_unitary(r: &EvaluationResult, g: &PlanarGraph, col: &[u32]) -> Result<EvaluationResult> {
    convert(r, g, col, Normalization::Unitary)
}

pub fn to_skein(r: &EvaluationResult, g: &PlanarGraph, col: &[u32]) -> Result<EvaluationResult> {
    convert(r, g, col, Normalization::Skein)
}

/// `Z^Spin = P^{-2}` up to total degree `degree`.
pub fn z_spin_series(g: &PlanarGraph, degree: u32) -> Result<TruncatedSeries> {
    series_inverse_square(&p_gamma(g)?, degree)
}

/// `Z^Spin * P^2 = 1` as truncated series up to total degree `degree`.
pub fn verify_westbury(g: &PlanarGraph, degree: u32) -> Result<crate::report::Check> {
    let p = p_gamma(g)?;
    let product = z_spin_series(g, degree)?.mul_poly(&(&p * &p));
    let mut check = crate::report::Check::new(format!("Z^Spin P^2 = 1 to degree {}", degree));
    check.record(product.is_one(), || format!("residual {}", product.poly()));
    Ok(check)
}

fn mul_boxed(a: &SparsePoly, b: &SparsePoly, bound: &[u32]) -> SparsePoly {
    let mut out = SparsePoly::zero(a.nvars());
    for (ea, ca) in a.terms() {
        for (eb, cb) in b.terms() {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            if e.iter().zip(bound).all(|(x, m)| x <= m) {
                out.add_term(e, ca * cb);
            }
        }
    }
    out
}

/// Coefficient of `prod Y_e^{c_e}` in `P^{-2}`, computed from
/// `sum_k (k+1)(1-P)^k` with every exponent capped at `col`.
pub fn series_coefficient(p: &SparsePoly, col: &[u32]) -> Result<Rational> {
    if !p.constant_term().is_one() {
        return Err(Error::NonUnitConstantTerm);
    }
    let n = p.nvars();
    let mut q = SparsePoly::zero(n);
    for (e, c) in p.terms() {
        if e.iter().any(|&x| x > 0) && e.iter().zip(col).all(|(x, m)| x <= m) {
            q.add_term(e.clone(), -c);
        }
    }
    let mut power = SparsePoly::one(n);
    let mut total = Rational::zero();
    let mut k = 1i64;
    while !power.is_zero() {
        total += power.coeff(col) * rat(k, 1);
        power = mul_boxed(&power, &q, col);
        k += 1;
    }
    Ok(total)
}

/// Exact integral evaluation from the series.
pub fn evaluate_integral_exact(g: &PlanarGraph, col: &[u32]) -> Result<EvaluationResult> {
    check_coloring(g, col)?;
    let q = series_coefficient(&p_gamma(g)?, col)?;
    Ok(EvaluationResult {
        value: to_f64(&q),
        error_bound: 0.0,
        exact: Some(q),
        normalization: Normalization::Integral,
    })
}

/// Every admissible coloring with colors `<= max_color`.
pub fn admissible_colorings(g: &PlanarGraph, max_color: u32) -> Vec<Coloring> {
    let ne = g.num_edges();
    let base = max_color as u64 + 1;
    let total = base.checked_pow(ne as u32).unwrap_or(u64::MAX);
    (0..total)
        .filter_map(|mut k| {
            let mut c = vec![0u32; ne];
            for x in c.iter_mut() {
                *x = (k % base) as u32;
                k /= base;
            }
            is_admissible(g, &c).then_some(c)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColoringMismatch {
    pub coloring: Coloring,
    pub tensor_integral: f64,
    #[serde(serialize_with = "ser_rational")]
    pub series: Rational,
    pub error_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OnlyIfWitness {
    /// Orientation mask with one edge reversed from the input.
    pub orientation: u64,
    pub flipped_edge: usize,
    pub coloring: Coloring,
    pub tensor_integral: f64,
    #[serde(serialize_with = "ser_rational")]
    pub series: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub orientation_is_kasteleyn: bool,
    pub colorings_checked: usize,
    pub max_abs_error: f64,
    pub tolerance: f64,
    pub mismatches: Vec<ColoringMismatch>,
    /// A non-Kasteleyn orientation and curve coloring where equality fails.
    pub only_if: Option<OnlyIfWitness>,
}

impl ComparisonReport {
    pub fn passed(&self) -> bool {
        self.orientation_is_kasteleyn && self.mismatches.is_empty() && self.only_if.is_some()
    }
}

/// Default tolerance of the comparison.
pub const COMPARISON_TOLERANCE: f64 = 1e-9;

fn compare_one(
    g: &PlanarGraph,
    o: &Orientation,
    p: &SparsePoly,
    col: &[u32],
    tol: f64,
) -> Result<(f64, Option<ColoringMismatch>)> {
    let s = evaluate_tensor(g, o, col)?;
    let int = to_integral(&s, g, col)?;
    let series = series_coefficient(p, col)?;
    let err = (int.value - to_f64(&series)).abs();
    let mismatch = (err > tol.max(int.error_bound)).then(|| ColoringMismatch {
        coloring: col.to_vec(),
        tensor_integral: int.value,
        series,
        error_bound: int.error_bound,
    });
    Ok((err, mismatch))
}

/// Compares the integral-normalized tensor evaluation against the series
/// coefficient for every admissible coloring up to `max_color`, then looks
/// for a single-edge reversal of `o` and a curve coloring where they differ.
pub fn verify_comparison_theorem(
    g: &PlanarGraph,
    o: &Orientation,
    max_color: u32,
) -> Result<ComparisonReport> {
    let p = p_gamma(g)?;
    let cols = admissible_colorings(g, max_color);
    let results: Vec<(f64, Option<ColoringMismatch>)> = cols
        .par_iter()
        .map(|c| compare_one(g, o, &p, c, COMPARISON_TOLERANCE))
        .collect::<Result<_>>()?;
    let max_abs_error = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let mismatches = results.into_iter().filter_map(|r| r.1).collect();

    let mut only_if = None;
    let cycles = g.simple_cycles()?;
    'search: for e in 0..g.num_edges() {
        let mut bad = o.clone();
        bad.flip_edge(e);
        for c in &cycles {
            let mut col = vec![0u32; g.num_edges()];
            for &x in c.edges() {
                col[x] = 1;
            }
            let (_, m) = compare_one(g, &bad, &p, &col, COMPARISON_TOLERANCE)?;
            if let Some(m) = m {
                only_if = Some(OnlyIfWitness {
                    orientation: bad.to_mask(),
                    flipped_edge: e,
                    coloring: m.coloring,
                    tensor_integral: m.tensor_integral,
                    series: m.series,
                });
                break 'search;
            }
        }
    }
    Ok(ComparisonReport {
        orientation_is_kasteleyn: is_kasteleyn(g, o).is_kasteleyn,
        colorings_checked: cols.len(),
        max_abs_error,
        tolerance: COMPARISON_TOLERANCE,
        mismatches,
        only_if,
    })
}

/// Result of a Whitehead move on edge `e = (u, w)`.
#[derive(Clone, Debug)]
pub struct WhiteheadMove {
    pub graph: PlanarGraph,
    pub orientation: Orientation,
    /// Edge whose direction was reversed to stay Kasteleyn, if any.
    pub flipped_edge: Option<usize>,
    /// Edges `[a, b, c, d]` around the moved edge: `a, b` at `u` and `c, d`
    /// at `w`, all in ccw order after `e`. Edge ids are preserved, colors on
    /// them are transported unchanged and the color on `e` is recoupled.
    pub neighbours: [usize; 4],
}

/// Slides edge `e`: if `u` reads `(e, a, b)` and `w` reads `(e, c, d)`
/// counter-clockwise, the new endpoints read `(e, d, a)` and `(e, b, c)`.
/// Rejected when two of the neighbouring half-edges belong to one edge, which
/// covers the theta graph.
pub fn whitehead_move(g: &PlanarGraph, o: &Orientation, e: usize) -> Result<WhiteheadMove> {
    if e >= g.num_edges() {
        return Err(Error::InvalidEdge(e, "no such edge".into()));
    }
    let hu = g.edge(e).src;
    let hw = g.twin(hu);
    let (u, w) = (g.vertex_of(hu), g.vertex_of(hw));
    if u == w {
        return Err(Error::InvalidEdge(e, "self-loop".into()));
    }
    let (ha, hb) = (g.next_ccw(hu), g.prev_ccw(hu));
    let (hc, hd) = (g.next_ccw(hw), g.prev_ccw(hw));
    let [a, b, c, d] = [ha, hb, hc, hd].map(|h| g.edge_of(h));
    if a == d || b == c || a == b || c == d {
        return Err(Error::InvalidEdge(
            e,
            "neighbouring half-edges share an edge; the move would create a multi-edge loop".into(),
        ));
    }
    let mut rotation: Vec<[usize; 3]> = (0..g.num_vertices()).map(|v| g.vertex_halves(v)).collect();
    rotation[u] = [hu, hd, ha];
    rotation[w] = [hw, hb, hc];
    let pairs: Vec<(usize, usize)> = g.edges().iter().map(|x| (x.src, x.dst)).collect();
    let graph = PlanarGraph::from_rotation(&rotation, &pairs)
        .map_err(|err| Error::InvalidEdge(e, err.to_string()))?;
    let graph = relabel_like(g, graph);
    let mut orientation = o.clone();
    let mut flipped_edge = None;
    if !is_kasteleyn(&graph, &orientation).is_kasteleyn {
        for x in [a, b, c, d] {
            let mut t = o.clone();
            t.flip_edge(x);
            if is_kasteleyn(&graph, &t).is_kasteleyn {
                orientation = t;
                flipped_edge = Some(x);
                break;
            }
        }
    }
    if !is_kasteleyn(&graph, &orientation).is_kasteleyn {
        return Err(Error::InvalidEdge(
            e,
            "no single flip restores the Kasteleyn property".into(),
        ));
    }
    Ok(WhiteheadMove {
        graph,
        orientation,
        flipped_edge,
        neighbours: [a, b, c, d],
    })
}

fn relabel_like(old: &PlanarGraph, new: PlanarGraph) -> PlanarGraph {
    let text = new.to_text();
    // the rotation builder numbers everything densely; carry the old labels
    let mut out = String::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("vertex") => {
                let v: usize = it.next().unwrap().parse().unwrap();
                let hs: Vec<String> = it
                    .map(|h| old.half_label(h.parse().unwrap()).to_string())
                    .collect();
                out.push_str(&format!(
                    "vertex {} {}\n",
                    old.vertex_label(v),
                    hs.join(" ")
                ));
            }
            Some("edge") => {
                let e: usize = it.next().unwrap().parse().unwrap();
                let hs: Vec<String> = it
                    .map(|h| old.half_label(h.parse().unwrap()).to_string())
                    .collect();
                out.push_str(&format!("edge {} {}\n", old.edge_label(e), hs.join(" ")));
            }
            _ => {}
        }
    }
    crate::graph::load_graph(&out).unwrap_or(new)
}

/// Checks the bubble identity on the tensor level: contracting two 3j
/// symbols over a pair of edges `j1, j2` leaves
/// `(-1)^(j1+j2+j) delta_{j j'} delta_{m m'} / (2j+1)`. Float route, all
/// doubled spins up to `max_two_j`.
pub fn check_bubble_removal(max_two_j: i64) -> crate::report::Check {
    let mut check = crate::report::Check::new("bubble removal");
    let mut worst: f64 = 0.0;
    for j1 in 0..=max_two_j {
        for j2 in 0..=max_two_j {
            for j in (j1 - j2).abs()..=j1 + j2 {
                if (j1 + j2 + j) % 2 != 0 {
                    continue;
                }
                for jp in (j1 - j2).abs()..=j1 + j2 {
                    if (j1 + j2 + jp) % 2 != 0 {
                        continue;
                    }
                    for m in (-j..=j).step_by(2) {
                        for mp in (-jp..=jp).step_by(2) {
                            let mut acc = 0.0;
                            for m1 in (-j1..=j1).step_by(2) {
                                for m2 in (-j2..=j2).step_by(2) {
                                    let phase = ((j1 - m1) / 2
                                        + (j2 - m2) / 2
                                        + (j - m) / 2
                                        + (j1 + j2 + jp) / 2)
                                        % 2;
                                    let s = if phase == 0 { 1.0 } else { -1.0 };
                                    acc += s
                                        * three_j_f64(j2, j1, j, -m2, -m1, -m)
                                        * three_j_f64(j1, j2, jp, m1, m2, mp);
                                }
                            }
                            let expect = if j == jp && m == mp {
                                1.0 / (j as f64 + 1.0)
                            } else {
                                0.0
                            };
                            worst = worst.max((acc - expect).abs());
                            check.record((acc - expect).abs() < 1e-12, || {
                                format!(
                                    "2j=({},{},{},{}) 2m=({},{}): {} vs {}",
                                    j1, j2, j, jp, m, mp, acc, expect
                                )
                            });
                        }
                    }
                }
            }
        }
    }
    check.with_detail(format!("max deviation {:.1e}", worst))
}

/// Integer check on a series: every coefficient is an integer.
pub fn all_integral(s: &TruncatedSeries) -> bool {
    s.poly().terms().all(|(_, c)| c.is_integer())
}

/// Rounds an integral-normalized float evaluation to the nearest integer.
pub fn nearest_integer(v: f64) -> Option<i64> {
    let r = v.round();
    ((v - r).abs() < 1e-6).then(|| r.to_i64()).flatten()
}

/// Sign of a float evaluation, treating values inside the bound as zero.
pub fn evaluation_sign(r: &EvaluationResult) -> i32 {
    if r.value.abs() <= r.error_bound {
        0
    } else if r.value.is_sign_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::graph::generate;
    use crate::kasteleyn::{make_kasteleyn, vertex_flip};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn theta_half_half_zero() {
        let g = generate("theta").unwrap();
        let o = Orientation::stored(&g);
        let col = [1, 1, 0];
        let s = evaluate_tensor(&g, &o, &col).unwrap();
        let int_ = to_integral(&s, &g, &col).unwrap();
        assert!(close(int_.value, -2.0), "{}", int_.value);
        assert!(close(to_unitary(&s, &g, &col).unwrap().value, 1.0));
        assert_eq!(
            evaluate_integral_exact(&g, &col).unwrap().exact,
            Some(int(-2))
        );
    }

    #[test]
    fn zero_coloring_is_one() {
        let g = generate("cube").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        let s = evaluate_tensor(&g, &o, &[0; 12]).unwrap();
        assert!(close(s.value, 1.0));
    }

    #[test]
    fn edge_flip_sign() {
        let g = generate("k4").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        for col in admissible_colorings(&g, 2) {
            let s = evaluate_tensor(&g, &o, &col).unwrap().value;
            for e in 0..6 {
                let mut f = o.clone();
                f.flip_edge(e);
                let t = evaluate_tensor(&g, &f, &col).unwrap().value;
                let sign = if col[e] % 2 == 0 { 1.0 } else { -1.0 };
                assert!(close(t, sign * s));
            }
        }
    }

    #[test]
    fn class_invariance() {
        for name in ["theta", "k4"] {
            let g = generate(name).unwrap();
            let o = make_kasteleyn(&g).unwrap();
            for col in admissible_colorings(&g, 2) {
                let s = evaluate_tensor(&g, &o, &col).unwrap().value;
                for v in 0..g.num_vertices() {
                    let t = evaluate_tensor(&g, &vertex_flip(&g, &o, v), &col)
                        .unwrap()
                        .value;
                    assert!(close(s, t));
                }
            }
        }
    }

    #[test]
    fn theta_unitary_is_one() {
        let g = generate("theta").unwrap();
        let o = Orientation::stored(&g);
        for col in admissible_colorings(&g, 4) {
            if col.iter().sum::<u32>() % 2 == 1 {
                continue;
            }
            let s = evaluate_tensor(&g, &o, &col).unwrap();
            assert!(
                close(to_unitary(&s, &g, &col).unwrap().value, 1.0),
                "{:?}",
                col
            );
        }
    }

    #[test]
    fn theta_series_coefficients() {
        let g = generate("theta").unwrap();
        let s = z_spin_series(&g, 4).unwrap();
        assert_eq!(s.coeff(&[1, 1, 0]), int(-2));
        assert_eq!(s.coeff(&[2, 2, 0]), int(3));
        assert_eq!(s.coeff(&[1, 0, 0]), int(0));
        let p = p_gamma(&g).unwrap();
        for col in admissible_colorings(&g, 3) {
            let d: u32 = col.iter().sum();
            if d <= 4 {
                assert_eq!(series_coefficient(&p, &col).unwrap(), s.coeff(&col));
            }
        }
    }

    #[test]
    fn skein_round_trip() {
        let g = generate("k4").unwrap();
        let col = [2, 2, 2, 2, 2, 2];
        let e = evaluate_integral_exact(&g, &col).unwrap();
        let sk = to_skein(&e, &g, &col).unwrap();
        let back = to_integral(&sk, &g, &col).unwrap();
        assert_eq!(back.exact, e.exact);
    }

    #[test]
    fn comparison_small() {
        let g = generate("theta").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        let r = verify_comparison_theorem(&g, &o, 2).unwrap();
        assert!(r.passed(), "{:?}", r);
    }

    #[test]
    fn inadmissible_rejected() {
        let g = generate("theta").unwrap();
        let o = Orientation::stored(&g);
        assert!(matches!(
            evaluate_tensor(&g, &o, &[1, 0, 0]),
            Err(Error::InadmissibleColoring(_))
        ));
        assert!(matches!(
            evaluate_tensor(&g, &o, &[1, 1]),
            Err(Error::ColoringLength { .. })
        ));
        assert!(matches!(
            unitary_sign(&[1, 1, 1]),
            Err(Error::FractionalSign(3))
        ));
    }

    #[test]
    fn whitehead_k4_and_theta() {
        let g = generate("k4").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        let m = whitehead_move(&g, &o, 0).unwrap();
        assert!(is_kasteleyn(&m.graph, &m.orientation).is_kasteleyn);
        assert_eq!(m.graph.num_vertices(), 4);
        let back = whitehead_move(&m.graph, &m.orientation, 0).unwrap();
        assert!(is_kasteleyn(&back.graph, &back.orientation).is_kasteleyn);
        assert_eq!(back.graph.canonical_form(), g.canonical_form());
        assert_ne!(m.graph.canonical_form(), g.canonical_form());
        let t = generate("theta").unwrap();
        assert!(matches!(
            whitehead_move(&t, &Orientation::stored(&t), 0),
            Err(Error::InvalidEdge(0, _))
        ));
    }

    #[test]
    fn bubble() {
        let c = check_bubble_removal(3);
        assert!(c.passed, "{}", c);
    }
}
