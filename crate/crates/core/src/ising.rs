//! Ising and O(n) loop partition functions on trivalent planar graphs, by
//! brute force over spins, by loop enumeration, and by dimers on the
//! triangle expansion.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{pfaffian, Rational, SkewMatrix, SparsePoly};
use crate::graph::{Orientation, PlanarGraph};
use crate::kasteleyn::is_kasteleyn;

/// Largest vertex count for spin sweeps.
pub const BRUTE_FORCE_MAX_VERTICES: usize = 24;

const DEFAULT_CHUNK_BITS: u32 = 6;

fn check_couplings(g: &PlanarGraph, y: &[Rational]) -> Result<()> {
    if y.len() != g.num_edges() {
        return Err(Error::Invalid(format!(
            "{} couplings for {} edges",
            y.len(),
            g.num_edges()
        )));
    }
    Ok(())
}

fn check_size(g: &PlanarGraph) -> Result<()> {
    if g.num_vertices() > BRUTE_FORCE_MAX_VERTICES {
        return Err(Error::SizeLimit {
            what: "vertices for spin sweep",
            actual: g.num_vertices(),
            limit: BRUTE_FORCE_MAX_VERTICES,
        });
    }
    Ok(())
}

/// Normalized sums `2^-#V sum_sigma prod_{v in mask} sigma_v prod_e (1 + Y_e sigma sigma)`
/// for each observable mask, with the empty mask giving the partition function.
///
/// Vertex 0 is pinned to `+1` and the global flip restored afterwards. The
/// remaining spins are split into `2^chunk_bits` blocks swept in parallel,
/// each in Gray-code order.
pub fn spin_sums(
    g: &PlanarGraph,
    y: &[Rational],
    observables: &[u64],
    chunk_bits: u32,
) -> Result<Vec<Rational>> {
    check_couplings(g, y)?;
    check_size(g)?;
    let nv = g.num_vertices();
    let ne = g.num_edges();
    // common denominator per edge: factor is (d + n) when aligned, (d - n) otherwise
    let plus: Vec<BigInt> = y.iter().map(|q| q.denom() + q.numer()).collect();
    let minus: Vec<BigInt> = y.iter().map(|q| q.denom() - q.numer()).collect();
    let plus_i: Option<Vec<i128>> = plus.iter().map(|b| b.to_i128()).collect();
    let minus_i: Option<Vec<i128>> = minus.iter().map(|b| b.to_i128()).collect();
    let ends: Vec<(usize, usize)> = (0..ne).map(|e| g.edge_endpoints(e)).collect();
    let mut incident = vec![0u64; nv];
    for (e, &(a, b)) in ends.iter().enumerate() {
        incident[a] ^= 1 << e;
        incident[b] ^= 1 << e;
    }

    let free = nv.saturating_sub(1) as u32;
    let chunk_bits = chunk_bits.min(free);
    let low_bits = free - chunk_bits;
    let nobs = observables.len();

    let partials: Vec<Vec<BigInt>> = (0..1u64 << chunk_bits)
        .into_par_iter()
        .map(|chunk| {
            let mut acc = vec![BigInt::zero(); nobs];
            // spins: bit v set means sigma_v = -1; vertex 0 stays +1
            let mut spins = chunk << (low_bits + 1);
            let mut disagree = 0u64;
            for (e, &(a, b)) in ends.iter().enumerate() {
                if (spins >> a ^ spins >> b) & 1 == 1 {
                    disagree |= 1 << e;
                }
            }
            for k in 0..1u64 << low_bits {
                if k > 0 {
                    let v = k.trailing_zeros() as usize + 1;
                    spins ^= 1 << v;
                    disagree ^= incident[v];
                }
                let w = weight(
                    ne,
                    disagree,
                    &plus,
                    &minus,
                    plus_i.as_deref(),
                    minus_i.as_deref(),
                );
                for (i, &mask) in observables.iter().enumerate() {
                    if (spins & mask).count_ones() % 2 == 0 {
                        acc[i] += &w;
                    } else {
                        acc[i] -= &w;
                    }
                }
            }
            acc
        })
        .collect();

    let mut denom = BigInt::one() << nv;
    for q in y {
        denom *= q.denom();
    }
    Ok((0..nobs)
        .map(|i| {
            if observables[i].count_ones() % 2 == 1 {
                return Rational::zero();
            }
            let total: BigInt = partials.iter().map(|p| &p[i]).sum();
            Rational::new(total * 2, denom.clone())
        })
        .collect())
}

fn weight(
    ne: usize,
    disagree: u64,
    plus: &[BigInt],
    minus: &[BigInt],
    plus_i: Option<&[i128]>,
    minus_i: Option<&[i128]>,
) -> BigInt {
    if let (Some(p), Some(m)) = (plus_i, minus_i) {
        let mut w: i128 = 1;
        let mut ok = true;
        for e in 0..ne {
            let f = if disagree >> e & 1 == 1 { m[e] } else { p[e] };
            match w.checked_mul(f) {
                Some(x) => w = x,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return BigInt::from(w);
        }
    }
    let mut w = BigInt::one();
    for e in 0..ne {
        w *= if disagree >> e & 1 == 1 {
            &minus[e]
        } else {
            &plus[e]
        };
    }
    w
}

/// `Z^Ising / (2^#V prod cosh y_e)` at exact couplings `Y_e = tanh y_e`.
pub fn z_ising_bruteforce(g: &PlanarGraph, y: &[Rational]) -> Result<Rational> {
    Ok(spin_sums(g, y, &[0], DEFAULT_CHUNK_BITS)?.remove(0))
}

/// Same sweep with an explicit split into `2^chunk_bits` parallel blocks.
pub fn z_ising_bruteforce_chunked(
    g: &PlanarGraph,
    y: &[Rational],
    chunk_bits: u32,
) -> Result<Rational> {
    Ok(spin_sums(g, y, &[0], chunk_bits)?.remove(0))
}

/// `<prod_{v in vertices} sigma_v>`.
pub fn spin_correlation(g: &PlanarGraph, y: &[Rational], vertices: &[usize]) -> Result<Rational> {
    let mut mask = 0u64;
    for &v in vertices {
        if v >= g.num_vertices() {
            return Err(Error::Invalid(format!("vertex {} out of range", v)));
        }
        mask ^= 1 << v;
    }
    let s = spin_sums(g, y, &[0, mask], DEFAULT_CHUNK_BITS)?;
    if s[0].is_zero() {
        return Err(Error::SingularCoupling);
    }
    Ok(&s[1] / &s[0])
}

/// Nearest-neighbour correlation `g_e = <sigma_s(e) sigma_t(e)>`.
pub fn nn_correlation(g: &PlanarGraph, y: &[Rational], e: usize) -> Result<Rational> {
    if e >= g.num_edges() {
        return Err(Error::Invalid(format!("edge {} out of range", e)));
    }
    let (a, b) = g.edge_endpoints(e);
    spin_correlation(g, y, &[a, b])
}

/// `<prod_{e in edges} sigma_s(e) sigma_t(e)>`, which reduces to the product
/// of spins at odd-degree vertices of the edge set.
pub fn edge_product_correlation(
    g: &PlanarGraph,
    y: &[Rational],
    edges: &[usize],
) -> Result<Rational> {
    let mut odd = vec![false; g.num_vertices()];
    for &e in edges {
        let (a, b) = g.edge_endpoints(e);
        odd[a] ^= true;
        odd[b] ^= true;
    }
    let vs: Vec<usize> = (0..g.num_vertices()).filter(|&v| odd[v]).collect();
    spin_correlation(g, y, &vs)
}

/// `ln Z^Ising` at real couplings `y_e`, summing `exp(sum_e y_e sigma sigma)`.
pub fn ising_log_z_f64(g: &PlanarGraph, y: &[f64]) -> Result<f64> {
    check_size(g)?;
    let nv = g.num_vertices();
    let ends: Vec<(usize, usize)> = (0..g.num_edges()).map(|e| g.edge_endpoints(e)).collect();
    let energies: Vec<f64> = (0..1u64 << nv)
        .into_par_iter()
        .map(|s| {
            ends.iter()
                .zip(y)
                .map(|(&(a, b), w)| if (s >> a ^ s >> b) & 1 == 1 { -w } else { *w })
                .sum::<f64>()
        })
        .collect();
    let top = energies.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(top + energies.iter().map(|x| (x - top).exp()).sum::<f64>().ln())
}

/// `g_e` at real couplings, in floating point.
pub fn nn_correlation_f64(g: &PlanarGraph, y: &[f64], e: usize) -> Result<f64> {
    check_size(g)?;
    let nv = g.num_vertices();
    let ends: Vec<(usize, usize)> = (0..g.num_edges()).map(|e| g.edge_endpoints(e)).collect();
    let (a, b) = ends[e];
    let (num, den) = (0..1u64 << nv)
        .into_par_iter()
        .map(|s| {
            let energy: f64 = ends
                .iter()
                .zip(y)
                .map(|(&(p, q), w)| if (s >> p ^ s >> q) & 1 == 1 { -w } else { *w })
                .sum();
            let b_w = energy.exp();
            let sign = if (s >> a ^ s >> b) & 1 == 1 {
                -1.0
            } else {
                1.0
            };
            (sign * b_w, b_w)
        })
        .reduce(|| (0.0, 0.0), |x, z| (x.0 + z.0, x.1 + z.1));
    Ok(num / den)
}

/// The loop polynomial `P = sum over even subgraphs of prod Y_e`, with one
/// variable per edge.
pub fn p_gamma(g: &PlanarGraph) -> Result<SparsePoly> {
    let ne = g.num_edges();
    let mut p = SparsePoly::zero(ne);
    for s in g.enumerate_even_subgraphs()? {
        let mut exps = vec![0u32; ne];
        for e in s.iter() {
            exps[e] = 1;
        }
        p.add_term(exps, Rational::one());
    }
    Ok(p)
}

/// O(n) loop model: `sum over even subgraphs of n^(components) prod Y_e`.
pub fn z_on_loop_model(g: &PlanarGraph, n: &Rational, y: &[Rational]) -> Result<Rational> {
    check_couplings(g, y)?;
    let mut total = Rational::zero();
    for s in g.enumerate_even_subgraphs()? {
        let mut term = Rational::one();
        for _ in 0..g.components(s) {
            term *= n;
        }
        for e in s.iter() {
            term *= &y[e];
        }
        total += term;
    }
    Ok(total)
}

/// Triangle expansion of `g`: node `h` of the result is half-edge `h` of `g`.
/// Edge `e` of `g` keeps index `e` and its orientation under `o`; the corner
/// edge for angle `h` gets index `#E + h` and runs from the angle's `t`
/// node to its `s` node, i.e. clockwise around the triangle.
pub fn triangle_expansion(g: &PlanarGraph, o: &Orientation) -> Result<PlanarGraph> {
    let ne = g.num_edges();
    let nh = g.num_half_edges();
    let mut edges = Vec::with_capacity(ne + nh);
    // Γ′ half-edge ids: 2e at the source node, 2e+1 at the target node
    for e in 0..ne {
        edges.push((2 * e, 2 * e + 1));
    }
    for h in 0..nh {
        let c = ne + h;
        edges.push((2 * c, 2 * c + 1));
    }
    let mut rotation = vec![[0usize; 3]; nh];
    for (h, rot) in rotation.iter_mut().enumerate() {
        let e = g.edge_of(h);
        let edge_half = if g.source_half(o, e) == h {
            2 * e
        } else {
            2 * e + 1
        };
        let to_next = 2 * (ne + h) + 1;
        let to_prev = 2 * (ne + g.prev_ccw(h));
        *rot = [edge_half, to_next, to_prev];
    }
    PlanarGraph::from_rotation(&rotation, &edges)
}

/// Weighted Kasteleyn matrix of the triangle expansion, with node `src(e)`
/// at row `2e` and `dst(e)` at row `2e + 1`, so that the matching of all
/// edge-type edges counts `+1`. Corner weights come from `corner(angle)`.
pub fn dimer_matrix<T: crate::exact::Ring>(
    g: &PlanarGraph,
    o: &Orientation,
    one: &T,
    corner: impl Fn(usize) -> T,
) -> Result<SkewMatrix<T>> {
    let expanded = triangle_expansion(g, o)?;
    let so = Orientation::stored(&expanded);
    if !is_kasteleyn(&expanded, &so).is_kasteleyn {
        return Err(Error::Invalid(
            "orientation is not Kasteleyn on the triangle expansion".into(),
        ));
    }
    let ne = g.num_edges();
    let nh = g.num_half_edges();
    let mut row = vec![0usize; nh];
    for e in 0..ne {
        row[g.source_half(o, e)] = 2 * e;
        row[g.target_half(o, e)] = 2 * e + 1;
    }
    let mut m = SkewMatrix::zeros(nh, &one.zero_like());
    for e in 0..ne {
        m.set(2 * e, 2 * e + 1, one.clone());
    }
    for h in 0..nh {
        let t = g.next_ccw(h);
        m.set(row[t], row[h], corner(h));
    }
    Ok(m)
}

/// `Pf` of the triangle-expansion matrix with `X_alpha = sqrt(Y_s Y_t)`,
/// returned as a polynomial in `Y`.
pub fn dimer_p_gamma(g: &PlanarGraph, o: &Orientation) -> Result<SparsePoly> {
    let ne = g.num_edges();
    let one = SparsePoly::one(ne);
    let m = dimer_matrix(g, o, &one, |h| {
        let mut e = vec![0u32; ne];
        e[g.edge_of(h)] += 1;
        e[g.edge_of(g.next_ccw(h))] += 1;
        SparsePoly::monomial(e, Rational::one())
    })?;
    pfaffian(&m)?.halve_exponents()
}

/// Same Pfaffian at square-root couplings `u_e` (so `Y_e = u_e^2`).
pub fn dimer_p_gamma_at(g: &PlanarGraph, o: &Orientation, u: &[Rational]) -> Result<Rational> {
    check_couplings(g, u)?;
    let m = dimer_matrix(g, o, &Rational::one(), |h| {
        &u[g.edge_of(h)] * &u[g.edge_of(g.next_ccw(h))]
    })?;
    crate::exact::pfaffian_rational(&m)
}

/// Positive part of a Pfaffian sign check: `true` when every term of `p` has
/// a positive coefficient.
pub fn all_coefficients_positive(p: &SparsePoly) -> bool {
    p.terms().all(|(_, c)| c.is_positive())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::graph::generate;
    use crate::kasteleyn::make_kasteleyn;

    fn uniform(g: &PlanarGraph, y: Rational) -> Vec<Rational> {
        vec![y; g.num_edges()]
    }

    #[test]
    fn theta_closed_forms() {
        let g = generate("theta").unwrap();
        for y in [rat(1, 2), rat(-1, 3), rat(2, 7)] {
            let z = z_ising_bruteforce(&g, &uniform(&g, y.clone())).unwrap();
            assert_eq!(z, int(1) + int(3) * &y * &y);
            let c = nn_correlation(&g, &uniform(&g, y.clone()), 0).unwrap();
            let y3 = &y * &y * &y;
            assert_eq!(c, (int(3) * &y + y3) / (int(1) + int(3) * &y * &y));
        }
        // 4 cosh 3y against the normalized sum
        let yr = 0.37f64;
        let lz = ising_log_z_f64(&g, &[yr; 3]).unwrap();
        let t = yr.tanh();
        let expect = (4.0 * yr.cosh().powi(3) * (1.0 + 3.0 * t * t)).ln();
        assert!((lz - expect).abs() < 1e-12);
        assert!((lz - (4.0 * (3.0 * yr).cosh()).ln()).abs() < 1e-12);
    }

    #[test]
    fn k4_uniform() {
        let g = generate("k4").unwrap();
        let y = rat(1, 3);
        let z = z_ising_bruteforce(&g, &uniform(&g, y.clone())).unwrap();
        let y3 = &y * &y * &y;
        assert_eq!(z, int(1) + int(4) * &y3 + int(3) * &y3 * &y);
        assert_eq!(nn_correlation(&g, &uniform(&g, int(1)), 2).unwrap(), int(1));
        assert_eq!(nn_correlation(&g, &uniform(&g, int(0)), 2).unwrap(), int(0));
        assert_eq!(
            z_ising_bruteforce(&g, &uniform(&g, int(0))).unwrap(),
            int(1)
        );
    }

    #[test]
    fn chunking_does_not_change_the_sum() {
        let g = generate("cube").unwrap();
        let y: Vec<Rational> = (0..12).map(|e| rat(e as i64 - 5, 13)).collect();
        let base = z_ising_bruteforce_chunked(&g, &y, 0).unwrap();
        for bits in 1..=7 {
            assert_eq!(z_ising_bruteforce_chunked(&g, &y, bits).unwrap(), base);
        }
    }

    #[test]
    fn loop_polynomial() {
        let g = generate("theta").unwrap();
        let p = p_gamma(&g).unwrap();
        let mut q = SparsePoly::one(3);
        q.add_term(vec![1, 1, 0], int(1));
        q.add_term(vec![1, 0, 1], int(1));
        q.add_term(vec![0, 1, 1], int(1));
        assert_eq!(p, q);
        let c = generate("cube").unwrap();
        let p = p_gamma(&c).unwrap();
        assert_eq!(p.constant_term(), int(1));
        assert_eq!(p.homogeneous_part(4).len(), 6);
    }

    #[test]
    fn loop_model() {
        let g = generate("theta").unwrap();
        let y = rat(1, 5);
        let u = uniform(&g, y.clone());
        assert_eq!(
            z_on_loop_model(&g, &int(1), &u).unwrap(),
            int(1) + int(3) * &y * &y
        );
        assert_eq!(
            z_on_loop_model(&g, &int(2), &u).unwrap(),
            int(1) + int(6) * &y * &y
        );
        assert_eq!(z_on_loop_model(&g, &int(0), &u).unwrap(), int(1));
    }

    #[test]
    fn expansion_is_kasteleyn_and_trivalent() {
        for name in ["theta", "k4", "prism3", "cube"] {
            let g = generate(name).unwrap();
            let o = make_kasteleyn(&g).unwrap();
            let x = triangle_expansion(&g, &o).unwrap();
            assert_eq!(x.num_vertices(), 2 * g.num_edges());
            assert_eq!(x.num_faces(), g.num_faces() + g.num_vertices());
            assert!(is_kasteleyn(&x, &Orientation::stored(&x)).is_kasteleyn);
        }
    }

    #[test]
    fn dimer_theta() {
        let g = generate("theta").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        assert_eq!(dimer_p_gamma(&g, &o).unwrap(), p_gamma(&g).unwrap());
        let k = generate("k4").unwrap();
        let o = make_kasteleyn(&k).unwrap();
        assert_eq!(dimer_p_gamma(&k, &o).unwrap(), p_gamma(&k).unwrap());
    }

    #[test]
    fn non_kasteleyn_rejected() {
        let g = generate("k4").unwrap();
        let mut o = make_kasteleyn(&g).unwrap();
        o.flip_edge(1);
        assert!(matches!(dimer_p_gamma(&g, &o), Err(Error::Invalid(_))));
    }

    #[test]
    fn size_limit() {
        let g = generate("dodecahedron").unwrap();
        assert!(ising_log_z_f64(&g, &[0.1; 30]).is_ok());
        let y = vec![rat(1, 2); 3];
        assert!(z_ising_bruteforce(&g, &y).is_err());
    }
}
