//! Identities linking the Ising side to the spin network side: the
//! fundamental equality `P^2 Z^Spin = 1`, the edge/angle coupling maps, the
//! mean color dictionary, path correlations, and the single-edge moments.

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{int, rat, series_inverse_square, to_f64, QSqrt, Rational, SparsePoly};
use crate::graph::{Cycle, PlanarGraph};
use crate::ising::{p_gamma, spin_sums};
use crate::report::{ser_rational, ser_rationals, Check};

/// Degree of the series sum in the fundamental equality check.
pub const FUNDAMENTAL_DEGREE: u32 = 30;

/// `n` random rationals `p/q` with `|p/q| <= bound`, from a fixed seed.
pub fn random_couplings(n: usize, bound: &Rational, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let q: i64 = rng.gen_range(2..=40);
            let p: i64 = rng.gen_range(-q..=q);
            rat(p, q) * bound
        })
        .collect()
}

fn check_len(g: &PlanarGraph, y: &[Rational]) -> Result<()> {
    if y.len() != g.num_edges() {
        return Err(Error::Invalid(format!(
            "{} couplings for {} edges",
            y.len(),
            g.num_edges()
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------- angles

/// Angle couplings `X_alpha`, indexed by the angle's `s` half-edge.
pub type AngleCouplings = Vec<QSqrt>;

/// `X_alpha = (Y_s Y_t)^(1/2)`. Principal roots need `Y_e >= 0`.
pub fn edges_to_angles(g: &PlanarGraph, y: &[Rational]) -> Result<AngleCouplings> {
    check_len(g, y)?;
    if let Some(e) = y.iter().position(|q| q.is_negative()) {
        return Err(Error::Domain(format!("coupling on edge {} is negative", e)));
    }
    g.angles()
        .iter()
        .map(|a| QSqrt::sqrt_of(&(&y[g.edge_of(a.s_half)] * &y[g.edge_of(a.t_half)])))
        .collect()
}

/// `Y_e^2` from angle couplings: the product over both endpoints of
/// `X_{e e1} X_{e e2} / X_{e1 e2}`.
pub fn angles_to_edges_squared(g: &PlanarGraph, x: &[QSqrt]) -> Result<Vec<QSqrt>> {
    if x.len() != g.num_half_edges() {
        return Err(Error::Invalid(format!(
            "{} angle couplings for {} angles",
            x.len(),
            g.num_half_edges()
        )));
    }
    (0..g.num_edges())
        .map(|e| {
            let mut acc = QSqrt::from_rational(Rational::one());
            for h in [g.edge(e).src, g.edge(e).dst] {
                let h1 = g.next_ccw(h);
                let h2 = g.next_ccw(h1);
                // angles at the vertex: (h, h1) = X[h], (h1, h2) = X[h1], (h2, h) = X[h2]
                if x[h1].is_zero() {
                    return Err(Error::ZeroCouplingDivision(h1));
                }
                let inv = QSqrt::from_rational(Rational::one() / x[h1].square());
                acc = &(&(&acc * &x[h]) * &x[h2]) * &(&inv * &x[h1]);
            }
            Ok(acc)
        })
        .collect()
}

/// `Y_e` from angle couplings, when the square root is representable.
pub fn angles_to_edges(g: &PlanarGraph, x: &[QSqrt]) -> Result<Vec<QSqrt>> {
    angles_to_edges_squared(g, x)?
        .into_iter()
        .enumerate()
        .map(|(e, sq)| {
            let q = sq
                .to_rational()
                .ok_or_else(|| Error::NotRepresentable(format!("Y_{}^2 = {}", e, sq)))?;
            QSqrt::sqrt_of(&q).map_err(|_| Error::NotRepresentable(format!("Y_{}^2 = {}", e, q)))
        })
        .collect()
}

/// Angles traversed by a simple cycle: at each of its vertices the one
/// angle formed by its two edges.
pub fn loop_angles(g: &PlanarGraph, c: &Cycle) -> Vec<usize> {
    let in_cycle = |h: usize| c.edges().contains(&g.edge_of(h));
    c.vertices()
        .iter()
        .map(|&v| {
            let hs = g.vertex_halves(v);
            *hs.iter()
                .find(|&&h| in_cycle(h) && in_cycle(g.next_ccw(h)))
                .expect("cycle passes through two edges at each vertex")
        })
        .collect()
}

/// Checks `prod_{alpha in L} X_alpha = prod_{e in L} Y_e` on every simple
/// cycle, plus the round trip edges to angles to edges.
pub fn verify_angle_maps(g: &PlanarGraph, y: &[Rational]) -> Result<Vec<Check>> {
    let x = edges_to_angles(g, y)?;
    let mut loops = Check::new("loop products X vs Y");
    for c in g.simple_cycles()? {
        let px = loop_angles(g, &c)
            .iter()
            .fold(QSqrt::from_rational(Rational::one()), |a, &h| &a * &x[h]);
        let py = c.edges().iter().fold(Rational::one(), |a, &e| a * &y[e]);
        loops.record(px == QSqrt::from_rational(py.clone()), || {
            format!("cycle {:?}: {} vs {}", c.edges(), px, py)
        });
    }
    let mut trip = Check::new("edges -> angles -> edges");
    let back = angles_to_edges(g, &x)?;
    for e in 0..g.num_edges() {
        trip.record(back[e] == QSqrt::from_rational(y[e].clone()), || {
            format!("edge {}: {} vs {}", e, back[e], y[e])
        });
    }
    Ok(vec![loops, trip])
}

/// Loop equality for arbitrary angle couplings, compared after squaring.
pub fn verify_angle_to_edge_loops(g: &PlanarGraph, x: &[QSqrt]) -> Result<Check> {
    let y2 = angles_to_edges_squared(g, x)?;
    let mut check = Check::new("loop products Y^2 vs X^2");
    for c in g.simple_cycles()? {
        let px = loop_angles(g, &c)
            .iter()
            .fold(Rational::one(), |a, &h| a * x[h].square());
        let py = c
            .edges()
            .iter()
            .fold(QSqrt::from_rational(Rational::one()), |a, &e| &a * &y2[e]);
        check.record(py == QSqrt::from_rational(px.clone()), || {
            format!("cycle {:?}: {} vs {}", c.edges(), py, px)
        });
    }
    Ok(check)
}

// ------------------------------------------------------ fundamental equality

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FundamentalReport {
    /// `P(Y)`.
    #[serde(serialize_with = "ser_rational")]
    pub p: Rational,
    /// Exact `1 / P(Y)^2`.
    #[serde(serialize_with = "ser_rational")]
    pub z_spin: Rational,
    /// `P^2 * (1/P^2) == 1`.
    pub exact_product_is_one: bool,
    pub degree: u32,
    /// Sum of the homogeneous parts of `P^{-2}` up to `degree`, at `Y`.
    pub series_sum: f64,
    /// `|series_sum - 1/P^2|`.
    pub series_error: f64,
    /// Rigorous bound on the discarded tail (infinite when the series
    /// diverges at `Y`).
    pub tail_bound: f64,
    /// Smallest modulus of a root of `t -> P(tY)`.
    pub root_radius: f64,
    pub series_agrees: bool,
}

fn univariate_coeffs(p: &SparsePoly) -> Vec<Rational> {
    let d = p.total_degree() as usize;
    (0..=d).map(|k| p.coeff(&[k as u32])).collect()
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Roots of `sum c_k t^k` by Durand-Kerner iteration.
fn polynomial_roots(c: &[f64]) -> Vec<Complex64> {
    let mut c = c.to_vec();
    while c.len() > 1 && c.last() == Some(&0.0) {
        c.pop();
    }
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let monic: Vec<f64> = c.iter().map(|x| x / lead).collect();
    // Fujiwara bound on the root moduli
    let bound = (1..=n)
        .map(|k| (monic[n - k].abs() / if k == n { 2.0 } else { 1.0 }).powf(1.0 / k as f64))
        .fold(0.0f64, f64::max)
        * 2.0;
    let seed = Complex64::from_polar(1.0, 0.4);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            seed * Complex64::from_polar(
                bound.max(1e-3),
                2.0 * std::f64::consts::PI * k as f64 / n as f64,
            )
        })
        .collect();
    for _ in 0..20_000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            let step = horner(&monic, z[i]) / den;
            if step.is_finite() {
                z[i] -= step;
                delta = delta.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if delta < 1e-14 {
            break;
        }
    }
    z
}

const CIRCLE_SAMPLES: usize = 4096;

/// Smallest `|q|` on `|t| = r`, reduced by a Lipschitz bound over one sample
/// spacing, and the winding number of `q` around 0 on that circle. `None`
/// when the samples cannot certify that `q` has no zero on the circle.
fn circle_certificate(q: &[f64], r: f64) -> Option<(f64, i64)> {
    let lip: f64 = q
        .iter()
        .enumerate()
        .map(|(k, a)| k as f64 * a.abs() * r.powi(k as i32))
        .sum();
    let step = 2.0 * std::f64::consts::PI / CIRCLE_SAMPLES as f64;
    let vals: Vec<Complex64> = (0..CIRCLE_SAMPLES)
        .map(|s| horner(q, Complex64::from_polar(r, step * s as f64)))
        .collect();
    let floor = vals.iter().map(|v| v.norm()).fold(f64::INFINITY, f64::min) - lip * step;
    if !(floor > 0.0) {
        return None;
    }
    // |q| > lip * step between neighbours, so each phase step is below pi
    let mut turn = 0.0;
    for i in 0..CIRCLE_SAMPLES {
        turn += (vals[(i + 1) % CIRCLE_SAMPLES] / vals[i]).arg();
    }
    Some((floor, (turn / (2.0 * std::f64::consts::PI)).round() as i64))
}

/// Cauchy tail bound for the Taylor series of `1/q(t)^2` at `t = 1`,
/// truncated after degree `d`: on a circle `|t| = r > 1` enclosing no zero
/// of `q` (certified by the winding number), every coefficient is at most
/// `M r^-k` with `M = 1 / min |q|^2`, so the tail is at most
/// `M r^-(d+1) / (1 - 1/r)`. Radii are tried up to the estimated root radius.
fn tail_bound(q: &[f64], radius: f64, d: u32) -> f64 {
    if q.len() <= 1 {
        return 0.0;
    }
    if radius <= 1.0 {
        return f64::INFINITY;
    }
    let top = radius.min(1e6);
    let mut best = f64::INFINITY;
    for i in 1..64 {
        let r = 1.0 + (top - 1.0) * i as f64 / 64.0;
        let Some((floor, winding)) = circle_certificate(q, r) else {
            continue;
        };
        if winding != 0 {
            break;
        }
        let b = r.powi(-(d as i32 + 1)) / (floor * floor * (1.0 - 1.0 / r));
        best = best.min(b);
    }
    best
}

/// `P(Y)^2 Z^Spin(Y) = 1`, with `Z^Spin(Y)` obtained both as the exact
/// `1/P(Y)^2` and as the graded series sum up to `degree`.
pub fn verify_fundamental_equality(
    g: &PlanarGraph,
    y: &[Rational],
    degree: u32,
) -> Result<FundamentalReport> {
    check_len(g, y)?;
    let poly = p_gamma(g)?;
    let p = poly.eval(y);
    if p.is_zero() {
        return Err(Error::SingularCoupling);
    }
    let z_spin = Rational::one() / (&p * &p);
    let exact_product_is_one = (&p * &p * &z_spin).is_one();

    let q = poly.graded_at(y);
    let series = series_inverse_square(&q, degree)?;
    let sum: Rational = series.poly().terms().map(|(_, c)| c.clone()).sum();
    let series_sum = to_f64(&sum);
    let series_error = to_f64(&(&sum - &z_spin).abs());
    let qf: Vec<f64> = univariate_coeffs(&q).iter().map(to_f64).collect();
    let root_radius = polynomial_roots(&qf)
        .iter()
        .map(|z| z.norm())
        .fold(f64::INFINITY, f64::min);
    let tail = tail_bound(&qf, root_radius, degree);
    Ok(FundamentalReport {
        p,
        z_spin,
        exact_product_is_one,
        degree,
        series_sum,
        series_error,
        tail_bound: tail,
        root_radius,
        series_agrees: series_error <= tail + 1e-15,
    })
}

// ------------------------------------------------------------- mean color

fn p_at(g: &PlanarGraph, y: &[Rational]) -> Result<(SparsePoly, Rational)> {
    check_len(g, y)?;
    let poly = p_gamma(g)?;
    let p = poly.eval(y);
    if p.is_zero() {
        return Err(Error::SingularCoupling);
    }
    Ok((poly, p))
}

/// `<2 j_e> = Y_e d/dY_e ln Z^Spin = -2 Y_e dP/dY_e / P`.
pub fn mean_color(g: &PlanarGraph, y: &[Rational], e: usize) -> Result<Rational> {
    let (poly, p) = p_at(g, y)?;
    Ok(int(-2) * &y[e] * poly.derivative(e).eval(y) / p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeanSpinReport {
    pub edge: usize,
    #[serde(serialize_with = "ser_rational")]
    pub mean_j: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub nn_correlation: Rational,
    /// `(Y^2 - Y g) / (1 - Y^2)`.
    #[serde(serialize_with = "ser_rational")]
    pub mean_j_from_ising: Rational,
    /// `(1/(2 cosh^2 y)) d/dtanh y ln Z^Spin`.
    #[serde(serialize_with = "ser_rational")]
    pub first_derivative_lhs: Rational,
    /// `tanh y - d/dy ln Z^Ising`.
    #[serde(serialize_with = "ser_rational")]
    pub first_derivative_rhs: Rational,
    pub checks: Vec<Check>,
}

impl MeanSpinReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Mean color against the nearest-neighbour correlation, with
/// `sinh y = Y / sqrt(1 - Y^2)` and `cosh y = 1 / sqrt(1 - Y^2)`.
pub fn verify_mean_spin_bridge(
    g: &PlanarGraph,
    y: &[Rational],
    e: usize,
) -> Result<MeanSpinReport> {
    if e >= g.num_edges() {
        return Err(Error::Invalid(format!("edge {} out of range", e)));
    }
    let (poly, p) = p_at(g, y)?;
    let ye = &y[e];
    let one_minus = int(1) - ye * ye;
    if !one_minus.is_positive() {
        return Err(Error::Domain(format!("|Y_{}| must be below 1", e)));
    }
    let pe = poly.derivative(e).eval(y);
    let mean_j = -(ye * &pe) / &p;
    let g_e = crate::ising::nn_correlation(g, y, e)?;
    let mean_j_from_ising = (ye * ye - ye * &g_e) / &one_minus;
    // d/dY ln Z^Spin = -2 P_e / P and 1/cosh^2 = 1 - Y^2
    let first_derivative_lhs = -(&one_minus * &pe) / &p;
    let first_derivative_rhs = ye - &g_e;

    let mut a = Check::new("mean color vs nn correlation");
    a.record(mean_j == mean_j_from_ising, || {
        format!("{} vs {}", mean_j, mean_j_from_ising)
    });
    let mut b = Check::new("first derivative identity");
    b.record(first_derivative_lhs == first_derivative_rhs, || {
        format!("{} vs {}", first_derivative_lhs, first_derivative_rhs)
    });
    let mut c = Check::new("nn correlation from mean color");
    if !ye.is_zero() {
        // <sigma sigma> = tanh y - <2j> / sinh 2y, sinh 2y = 2Y / (1 - Y^2)
        let back = ye - int(2) * &mean_j * &one_minus / (int(2) * ye);
        c.record(back == g_e, || format!("{} vs {}", back, g_e));
    }
    Ok(MeanSpinReport {
        edge: e,
        mean_j,
        nn_correlation: g_e,
        mean_j_from_ising,
        first_derivative_lhs,
        first_derivative_rhs,
        checks: vec![a, b, c],
    })
}

// ------------------------------------------------------- path correlations

/// All set partitions of `items`.
fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    match items.split_first() {
        None => vec![Vec::new()],
        Some((&first, rest)) => {
            let mut out = Vec::new();
            for p in set_partitions(rest) {
                for i in 0..p.len() {
                    let mut q = p.clone();
                    q[i].insert(0, first);
                    out.push(q);
                }
                let mut q = p;
                q.insert(0, vec![first]);
                out.push(q);
            }
            out
        }
    }
}

fn factorial_i(n: usize) -> Rational {
    (1..=n as i64).fold(int(1), |a, k| a * int(k))
}

/// Joint cumulant of indices `0..n` from moments of every subset (bitmask).
fn joint_cumulant(n: usize, moment: &dyn Fn(u32) -> Rational) -> Rational {
    let items: Vec<usize> = (0..n).collect();
    let mut total = Rational::zero();
    for p in set_partitions(&items) {
        let k = p.len();
        let mut term = factorial_i(k - 1);
        if k % 2 == 0 {
            term = -term;
        }
        for b in &p {
            term *= moment(b.iter().fold(0u32, |m, &i| m | 1 << i));
        }
        total += term;
    }
    total
}

fn moment_from_cumulants(mask: u32, cumulant: &dyn Fn(u32) -> Rational) -> Rational {
    let items: Vec<usize> = (0..32).filter(|i| mask >> i & 1 == 1).collect();
    set_partitions(&items)
        .iter()
        .map(|p| {
            p.iter()
                .map(|b| cumulant(b.iter().fold(0u32, |m, &i| m | 1 << i)))
                .product::<Rational>()
        })
        .sum()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathCorrelationReport {
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
    /// Joint cumulant of the edge products `sigma_s sigma_t` from spin sums.
    #[serde(serialize_with = "ser_rational")]
    pub ising_cumulant: Rational,
    /// `-2^(n-1) / prod sinh 2y_e` times the joint cumulant of the colors,
    /// plus `tanh y` when `n = 1`.
    #[serde(serialize_with = "ser_rational")]
    pub spin_cumulant_side: Rational,
    pub cumulant_identity_holds: bool,
    /// The cut sum of nearest-neighbour-segment correlations along the path.
    #[serde(serialize_with = "ser_rational")]
    pub ising_cut_sum: Rational,
    /// Prefactor times the cut sum of color moments along the path.
    #[serde(serialize_with = "ser_rational")]
    pub spin_cut_sum_side: Rational,
    pub cut_sum_identity_holds: bool,
}

/// Vertex sequence of a simple path given by its edges.
pub fn path_vertices(g: &PlanarGraph, edges: &[usize]) -> Result<Vec<usize>> {
    if edges.is_empty() {
        return Err(Error::PathNotSimple("empty path".into()));
    }
    if let Some(&e) = edges.iter().find(|&&e| e >= g.num_edges()) {
        return Err(Error::Invalid(format!("edge {} out of range", e)));
    }
    let (a, b) = g.edge_endpoints(edges[0]);
    let start = if edges.len() == 1 {
        a
    } else {
        let (c, d) = g.edge_endpoints(edges[1]);
        if b == c || b == d {
            a
        } else {
            b
        }
    };
    let mut vs = vec![start];
    for &e in edges {
        let cur = *vs.last().unwrap();
        let (x, y) = g.edge_endpoints(e);
        let next = if x == cur {
            y
        } else if y == cur {
            x
        } else {
            return Err(Error::PathNotSimple(format!(
                "edge {} does not continue the path",
                e
            )));
        };
        if vs.contains(&next) {
            return Err(Error::PathNotSimple(format!("vertex {} repeats", next)));
        }
        vs.push(next);
    }
    Ok(vs)
}

/// Connected correlation along a simple path, both as a joint cumulant and
/// as the sum over cuts of the path, on the Ising side and on the color side.
///
/// The color side uses `d/dy = (1 - Y^2) d/dY` and
/// `sinh 2y = 2Y / (1 - Y^2)`, so the cumulant identity reads
/// `kappa(sigma sigma_1, ..., sigma sigma_n) = prod (1 - Y_e^2) d^n ln P`
/// for `n >= 2`.
pub fn connected_path_correlation(
    g: &PlanarGraph,
    y: &[Rational],
    path: &[usize],
) -> Result<PathCorrelationReport> {
    let vertices = path_vertices(g, path)?;
    let (poly, p) = p_at(g, y)?;
    let n = path.len();
    if n > 12 {
        return Err(Error::SizeLimit {
            what: "path length",
            actual: n,
            limit: 12,
        });
    }
    // Ising moments <prod_{i in B} sigma_v(i) sigma_v(i+1)> for every subset B
    let masks: Vec<u64> = (0..1u32 << n)
        .map(|b| {
            (0..n)
                .filter(|i| b >> i & 1 == 1)
                .fold(0u64, |m, i| m ^ (1 << vertices[i]) ^ (1 << vertices[i + 1]))
        })
        .collect();
    let mut sums = spin_sums(g, y, &masks, 4)?;
    let z = sums[0].clone();
    if z.is_zero() {
        return Err(Error::SingularCoupling);
    }
    for s in sums.iter_mut() {
        *s = &*s / &z;
    }
    let ising_moment = |b: u32| sums[b as usize].clone();
    let ising_cumulant = joint_cumulant(n, &ising_moment);

    // d_B P / P for every subset of path edges
    let deriv_moment: Vec<Rational> = (0..1u32 << n)
        .map(|b| {
            let mut q = poly.clone();
            for i in 0..n {
                if b >> i & 1 == 1 {
                    q = q.derivative(path[i]);
                }
            }
            q.eval(y) / &p
        })
        .collect();
    let log_p_derivative = |b: u32| {
        let idx: Vec<usize> = (0..n).filter(|i| b >> i & 1 == 1).collect();
        joint_cumulant(idx.len(), &|sub: u32| {
            let mask = (0..idx.len())
                .filter(|k| sub >> k & 1 == 1)
                .fold(0u32, |m, k| m | 1 << idx[k]);
            deriv_moment[mask as usize].clone()
        })
    };
    let full = (1u32 << n) - 1;
    let damp: Rational = path.iter().map(|&e| int(1) - &y[e] * &y[e]).product();
    let mut spin_cumulant_side = &damp * log_p_derivative(full);
    if n == 1 {
        spin_cumulant_side += &y[path[0]];
    }
    let cumulant_identity_holds = spin_cumulant_side == ising_cumulant;

    // color cumulants in the derivative normalization: -2 d_B ln P; colors
    // moments are these moments times prod Y over the block
    let spin_deriv_moment =
        |b: u32| moment_from_cumulants(b, &|c: u32| int(-2) * log_p_derivative(c));
    let mut ising_cut_sum = Rational::zero();
    let mut spin_cut = Rational::zero();
    for cuts in 0..1u32 << (n - 1) {
        // bit i set: cut at vertex i+1
        let mut blocks = Vec::new();
        let mut cur = 0u32;
        for i in 0..n {
            cur |= 1 << i;
            if i == n - 1 || cuts >> i & 1 == 1 {
                blocks.push(cur);
                cur = 0;
            }
        }
        let sign = if cuts.count_ones() % 2 == 0 {
            int(1)
        } else {
            int(-1)
        };
        // a block of consecutive edges has sigma product = sigma at its ends
        let ising_term: Rational = blocks.iter().map(|&b| ising_moment(b)).product();
        let spin_term: Rational = blocks.iter().map(|&b| spin_deriv_moment(b)).product();
        ising_cut_sum += &sign * ising_term;
        spin_cut += sign * spin_term;
    }
    // -2^(n-1) / prod sinh 2y_e * prod Y_e = -prod (1 - Y_e^2) / 2
    let mut spin_cut_sum_side = -(&damp * spin_cut) / int(2);
    if n == 1 {
        spin_cut_sum_side += &y[path[0]];
    }
    let cut_sum_identity_holds = spin_cut_sum_side == ising_cut_sum;
    Ok(PathCorrelationReport {
        edges: path.to_vec(),
        vertices,
        ising_cumulant,
        spin_cumulant_side,
        cumulant_identity_holds,
        ising_cut_sum,
        spin_cut_sum_side,
        cut_sum_identity_holds,
    })
}

// ------------------------------------------------------------------ moments

/// Stirling numbers of the second kind `S(n, k)` for `n, k <= max`.
pub fn stirling2(max: usize) -> Vec<Vec<Rational>> {
    let mut s = vec![vec![Rational::zero(); max + 1]; max + 1];
    s[0][0] = int(1);
    for n in 1..=max {
        for k in 1..=n {
            s[n][k] = int(k as i64) * &s[n - 1][k] + &s[n - 1][k - 1];
        }
    }
    s
}

/// `Li_{-n}(z) = sum_{k>=1} k^n z^k` for `n >= 0`, as the exact rational
/// `z A_n(z) / (1 - z)^(n+1)` with Eulerian numbers `A(n, m)`.
pub fn polylog_neg(n: usize, z: &Rational) -> Rational {
    // A(n, m) = (m+1) A(n-1, m) + (n-m) A(n-1, m-1), A(0, 0) = 1
    let mut a = vec![int(1)];
    for k in 1..=n {
        let mut next = vec![Rational::zero(); k];
        for m in 0..k {
            let mut v = int(m as i64 + 1) * a.get(m).cloned().unwrap_or_else(Rational::zero);
            if m > 0 {
                v += int((k - m) as i64) * &a[m - 1];
            }
            next[m] = v;
        }
        a = next;
    }
    let mut poly = Rational::zero();
    let mut zp = int(1);
    for c in &a {
        poly += c * &zp;
        zp *= z;
    }
    let mut den = int(1);
    for _ in 0..=n {
        den *= int(1) - z;
    }
    z * poly / den
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentReport {
    pub edge: usize,
    #[serde(serialize_with = "ser_rational")]
    pub mean_j: Rational,
    /// `d^n/d(tanh y)^n ln Z^Spin`, `n = 1..=N`.
    #[serde(serialize_with = "ser_rationals")]
    pub kappa: Vec<Rational>,
    /// `2 (n-1)! (kappa_1 / 2)^n`.
    #[serde(serialize_with = "ser_rationals")]
    pub kappa_formula: Vec<Rational>,
    /// `d^n/dy^n ln Z^Spin` (the other derivative chain), `n = 1..=N`.
    #[serde(serialize_with = "ser_rationals")]
    pub kappa_y_chain: Vec<Rational>,
    /// `2 (n-1)! (k_1 / 2)^n` built from the `y` chain.
    #[serde(serialize_with = "ser_rationals")]
    pub kappa_y_chain_formula: Vec<Rational>,
    /// `d^n/d(tanh y)^n Z^Spin / Z^Spin`, `n = 0..=N`.
    #[serde(serialize_with = "ser_rationals")]
    pub mu: Vec<Rational>,
    /// `(n+1)! (kappa_1/2)^n`.
    #[serde(serialize_with = "ser_rationals")]
    pub mu_formula: Vec<Rational>,
    /// `<(2j)^n>` by the Stirling expansion in `<j>`, `n = 0..=N`.
    #[serde(serialize_with = "ser_rationals")]
    pub moments_stirling: Vec<Rational>,
    /// `<(2j)^n>` from the exact derivatives of `Z^Spin`.
    #[serde(serialize_with = "ser_rationals")]
    pub moments_derivatives: Vec<Rational>,
    /// `<(2j)^n>` by summing the closed-form distribution (exact polylogs).
    #[serde(serialize_with = "ser_rationals")]
    pub moments_distribution: Vec<Rational>,
    /// `n! [t^n] 1/(1 - <j>(e^t - 1))^2`.
    #[serde(serialize_with = "ser_rationals")]
    pub moments_generating_function: Vec<Rational>,
    /// `P(2j = n)` for `n = 0..=N`.
    #[serde(serialize_with = "ser_rationals")]
    pub distribution: Vec<Rational>,
    /// The distribution has negative entries (`<j> < 0`).
    pub is_signed: bool,
    /// Ratio `<j>/(1+<j>)`.
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
    pub checks: Vec<Check>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// `P` as a polynomial in `Y_e` alone, other couplings fixed.
fn restrict(p: &SparsePoly, y: &[Rational], e: usize) -> SparsePoly {
    let mut out = SparsePoly::zero(1);
    for (ex, c) in p.terms() {
        let mut t = c.clone();
        for (i, &k) in ex.iter().enumerate() {
            if i != e {
                for _ in 0..k {
                    t *= &y[i];
                }
            }
        }
        out.add_term(vec![ex[e]], t);
    }
    out
}

/// Univariate rational function `num / den` in one variable.
#[derive(Clone, Debug)]
struct RatFn {
    num: SparsePoly,
    den: SparsePoly,
}

impl RatFn {
    fn derivative(&self) -> RatFn {
        let n1 = &self.num.derivative(0) * &self.den;
        let n2 = &self.num * &self.den.derivative(0);
        RatFn {
            num: &n1 - &n2,
            den: &self.den * &self.den,
        }
    }

    fn mul_poly(&self, p: &SparsePoly) -> RatFn {
        RatFn {
            num: &self.num * p,
            den: self.den.clone(),
        }
    }

    fn eval(&self, x: &Rational) -> Rational {
        let pt = [x.clone()];
        self.num.eval(&pt) / self.den.eval(&pt)
    }
}

/// Moments of the color on one edge, by several independent routes.
pub fn moment_theorem(
    g: &PlanarGraph,
    y: &[Rational],
    e: usize,
    n_max: usize,
) -> Result<MomentReport> {
    if e >= g.num_edges() {
        return Err(Error::Invalid(format!("edge {} out of range", e)));
    }
    let (poly, p) = p_at(g, y)?;
    let ye = y[e].clone();
    let q = restrict(&poly, y, e);
    let pt = [ye.clone()];

    // m_k = q^(k)(Y)/q(Y); ln-derivatives by the moment-cumulant recursion
    let mut dq = q.clone();
    let mut m = vec![int(1)];
    for _ in 1..=n_max {
        dq = dq.derivative(0);
        m.push(dq.eval(&pt) / &p);
    }
    let binom =
        |n: usize, k: usize| -> Rational { factorial_i(n) / (factorial_i(k) * factorial_i(n - k)) };
    let mut log_p = vec![Rational::zero(); n_max + 1];
    for n in 1..=n_max {
        let mut v = m[n].clone();
        for k in 1..n {
            v -= binom(n - 1, k - 1) * &log_p[k] * &m[n - k];
        }
        log_p[n] = v;
    }
    let kappa: Vec<Rational> = (1..=n_max).map(|n| int(-2) * &log_p[n]).collect();
    let half_k1 = if n_max > 0 {
        &kappa[0] / int(2)
    } else {
        Rational::zero()
    };
    let kappa_formula: Vec<Rational> = (1..=n_max)
        .map(|n| int(2) * factorial_i(n - 1) * pow(&half_k1, n))
        .collect();

    // mu_n from the kappa_n by the inverse recursion, for Z^Spin = exp(kappa(t))
    let mut mu = vec![int(1)];
    for n in 1..=n_max {
        let mut v = Rational::zero();
        for k in 1..=n {
            v += binom(n - 1, k - 1) * &kappa[k - 1] * &mu[n - k];
        }
        mu.push(v);
    }
    let mu_formula: Vec<Rational> = (0..=n_max)
        .map(|n| factorial_i(n + 1) * pow(&half_k1, n))
        .collect();

    // y chain: D = (1 - Y^2) d/dY applied to -2 ln q
    let damp = {
        let mut d = SparsePoly::one(1);
        d.add_term(vec![2], int(-1));
        d
    };
    let mut f = RatFn {
        num: q
            .derivative(0)
            .scale(&int(-2))
            .mul_truncated(&damp, u32::MAX),
        den: q.clone(),
    };
    let mut kappa_y_chain = Vec::new();
    for _ in 1..=n_max {
        kappa_y_chain.push(f.eval(&ye));
        f = f.derivative().mul_poly(&damp);
    }
    let half_y1 = kappa_y_chain
        .first()
        .map(|k| k / int(2))
        .unwrap_or_else(Rational::zero);
    let kappa_y_chain_formula: Vec<Rational> = (1..=n_max)
        .map(|n| int(2) * factorial_i(n - 1) * pow(&half_y1, n))
        .collect();

    let mean_j = -(&ye * &m[1]);
    let s = stirling2(n_max);
    let moments_stirling: Vec<Rational> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return int(1);
            }
            (1..=n)
                .map(|k| &s[n][k] * factorial_i(k + 1) * pow(&mean_j, k))
                .sum()
        })
        .collect();
    // falling factorial moments Y^k mu_k
    let moments_derivatives: Vec<Rational> = (0..=n_max)
        .map(|n| {
            if n == 0 {
                return int(1);
            }
            (1..=n).map(|k| &s[n][k] * pow(&ye, k) * &mu[k]).sum()
        })
        .collect();

    let one_plus = int(1) + &mean_j;
    if one_plus.is_zero() {
        return Err(Error::DivergentTail(f64::INFINITY));
    }
    let ratio = &mean_j / &one_plus;
    if ratio.abs() >= int(1) {
        return Err(Error::DivergentTail(to_f64(&ratio.abs())));
    }
    let norm = int(1) / (&one_plus * &one_plus);
    let distribution: Vec<Rational> = (0..=n_max)
        .map(|n| int(n as i64 + 1) * &norm * pow(&ratio, n))
        .collect();
    // sum_k (k+1) z^k k^n = Li_{-n-1}(z) + Li_{-n}(z), plus the k = 0 term when n = 0
    let moments_distribution: Vec<Rational> = (0..=n_max)
        .map(|n| {
            let k0 = if n == 0 { int(1) } else { Rational::zero() };
            &norm * (polylog_neg(n + 1, &ratio) + polylog_neg(n, &ratio) + k0)
        })
        .collect();

    // Taylor series of 1/(1 - <j>(e^t - 1))^2 up to t^N
    let u: Vec<Rational> = (0..=n_max)
        .map(|k| {
            if k == 0 {
                Rational::zero()
            } else {
                int(1) / factorial_i(k)
            }
        })
        .collect();
    let mut gf = vec![Rational::zero(); n_max + 1];
    let mut upow = vec![Rational::zero(); n_max + 1];
    upow[0] = int(1);
    for k in 0..=n_max {
        // term (k+1) <j>^k u^k
        let c = int(k as i64 + 1) * pow(&mean_j, k);
        for i in 0..=n_max {
            gf[i] += &c * &upow[i];
        }
        let mut next = vec![Rational::zero(); n_max + 1];
        for i in 0..=n_max {
            for j in 0..=n_max - i {
                next[i + j] += &upow[i] * &u[j];
            }
        }
        upow = next;
    }
    let moments_generating_function: Vec<Rational> =
        (0..=n_max).map(|n| &gf[n] * factorial_i(n)).collect();

    let mut checks = Vec::new();
    let mut c = Check::new("kappa_n = 2(n-1)!(kappa_1/2)^n (tanh chain)");
    for n in 0..n_max {
        c.record(kappa[n] == kappa_formula[n], || {
            format!("n={}: {} vs {}", n + 1, kappa[n], kappa_formula[n])
        });
    }
    checks.push(c);
    let mut c = Check::new("mu_n = (n+1)!(kappa_1/2)^n");
    for n in 0..=n_max {
        c.record(mu[n] == mu_formula[n], || {
            format!("n={}: {} vs {}", n, mu[n], mu_formula[n])
        });
    }
    checks.push(c);
    for (name, other) in [
        ("moments: Stirling vs derivatives", &moments_derivatives),
        ("moments: Stirling vs distribution", &moments_distribution),
        (
            "moments: Stirling vs generating function",
            &moments_generating_function,
        ),
    ] {
        let mut c = Check::new(name);
        for n in 0..=n_max {
            c.record(moments_stirling[n] == other[n], || {
                format!("n={}: {} vs {}", n, moments_stirling[n], other[n])
            });
        }
        checks.push(c);
    }
    let mut c = Check::new("distribution sums to 1");
    let total = &norm * (polylog_neg(1, &ratio) + polylog_neg(0, &ratio) + int(1));
    c.record(total.is_one(), || format!("sum = {}", total));
    checks.push(c);

    Ok(MomentReport {
        edge: e,
        mean_j: mean_j.clone(),
        kappa,
        kappa_formula,
        kappa_y_chain,
        kappa_y_chain_formula,
        mu,
        mu_formula,
        moments_stirling,
        moments_derivatives,
        moments_distribution,
        moments_generating_function,
        distribution,
        is_signed: mean_j.is_negative(),
        ratio,
        checks,
    })
}

fn pow(x: &Rational, n: usize) -> Rational {
    (0..n).fold(int(1), |a, _| a * x)
}

/// `sum_{n <= N} P(2j = n)` in closed form:
/// `1 - (N+2) z^(N+1) + (N+1) z^(N+2)` with `z = <j>/(1+<j>)`.
pub fn distribution_partial_sum(ratio: &Rational, n: usize) -> Rational {
    int(1) - int(n as i64 + 2) * pow(ratio, n + 1) + int(n as i64 + 1) * pow(ratio, n + 2)
}

/// `sum_{k <= K} P(2j = k) k^n` in floating point, summing until the terms
/// fall below `1e-18` relative to the running total.
pub fn moment_partial_sum(mean_j: f64, n: u32) -> f64 {
    let z = mean_j / (1.0 + mean_j);
    let norm = 1.0 / ((1.0 + mean_j) * (1.0 + mean_j));
    let mut total = 0.0;
    let mut zk = 1.0;
    for k in 0..100_000u32 {
        let term = norm * (k as f64 + 1.0) * zk * (k as f64).powi(n as i32);
        total += term;
        if k > 10 && term.abs() < 1e-18 * total.abs().max(1e-300) {
            break;
        }
        zk *= z;
    }
    total
}
