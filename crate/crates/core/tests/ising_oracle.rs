mod common;

use num_traits::Zero;
use spinduality::exact::{int, rat, Rational};
use spinduality::graph::PlanarGraph;
use spinduality::ising::{
    all_coefficients_positive, dimer_p_gamma, edge_product_correlation, nn_correlation, p_gamma,
    spin_correlation, z_ising_bruteforce, z_on_loop_model,
};
use spinduality::kasteleyn::make_kasteleyn;

use common::*;

fn edge_pairs(g: &PlanarGraph) -> Vec<(usize, usize)> {
    (0..g.num_edges()).map(|e| g.edge_endpoints(e)).collect()
}

// sum over spins of prod (1 + Y s_u s_v) times an observable, divided by 2^V
fn spin_sum(g: &PlanarGraph, y: &[Rational], obs: impl Fn(u64) -> i64) -> Rational {
    let pairs = edge_pairs(g);
    let v = g.num_vertices();
    let mut total = Rational::zero();
    for s in 0u64..1 << v {
        let spin = |i: usize| if s >> i & 1 == 1 { -1 } else { 1 };
        let mut w = int(obs(s));
        for (e, &(a, b)) in pairs.iter().enumerate() {
            w *= int(1) + int(spin(a) * spin(b)) * &y[e];
        }
        total += w;
    }
    total / int(1 << v)
}

// even subgraphs, each weighted by prod Y_e
fn even_subgraph_sum(g: &PlanarGraph, y: &[Rational]) -> Rational {
    let pairs = edge_pairs(g);
    let mut total = Rational::zero();
    for mask in 0u64..1 << pairs.len() {
        let mut deg = vec![0; g.num_vertices()];
        let mut w = int(1);
        for (e, &(a, b)) in pairs.iter().enumerate() {
            if mask >> e & 1 == 1 {
                deg[a] += 1;
                deg[b] += 1;
                w *= &y[e];
            }
        }
        if deg.iter().all(|d| d % 2 == 0) {
            total += w;
        }
    }
    total
}

#[test]
fn partition_function_matches_spin_enumeration() {
    for name in FIXTURES {
        let g = fixture(name);
        let y: Vec<Rational> = (0..g.num_edges()).map(|e| rat(e as i64 + 1, 17)).collect();
        let want = spin_sum(&g, &y, |_| 1);
        assert_eq!(z_ising_bruteforce(&g, &y).unwrap(), want, "{}", name);
        assert_eq!(
            p_gamma(&g).unwrap().eval(&y),
            even_subgraph_sum(&g, &y),
            "{}",
            name
        );
        assert_eq!(z_on_loop_model(&g, &int(1), &y).unwrap(), want, "{}", name);
    }
}

#[test]
fn correlations_match_spin_enumeration() {
    for name in ["theta", "k4", "prism3"] {
        let g = fixture(name);
        let y: Vec<Rational> = (0..g.num_edges()).map(|e| rat(3 - e as i64, 7)).collect();
        let z = spin_sum(&g, &y, |_| 1);
        let pairs = edge_pairs(&g);
        let sigma = |s: u64, i: usize| if s >> i & 1 == 1 { -1 } else { 1 };
        for (e, &(a, b)) in pairs.iter().enumerate() {
            let num = spin_sum(&g, &y, |s| sigma(s, a) * sigma(s, b));
            assert_eq!(nn_correlation(&g, &y, e).unwrap(), &num / &z);
        }
        let vs = [0, 1];
        let num = spin_sum(&g, &y, |s| sigma(s, 0) * sigma(s, 1));
        assert_eq!(spin_correlation(&g, &y, &vs).unwrap(), &num / &z);
        let path = [0, 1];
        let num = spin_sum(&g, &y, |s| {
            path.iter()
                .map(|&e| sigma(s, pairs[e].0) * sigma(s, pairs[e].1))
                .product()
        });
        assert_eq!(edge_product_correlation(&g, &y, &path).unwrap(), &num / &z);
    }
}

#[test]
fn dimer_pfaffian_reproduces_loop_polynomial() {
    for name in FIXTURES {
        let g = fixture(name);
        let o = make_kasteleyn(&g).unwrap();
        let p = p_gamma(&g).unwrap();
        assert_eq!(dimer_p_gamma(&g, &o).unwrap(), p, "{}", name);
        assert!(all_coefficients_positive(&p));
    }
}

#[test]
fn theta_and_k4_closed_forms() {
    let y = rat(1, 2);
    let g = fixture("theta");
    assert_eq!(
        p_gamma(&g).unwrap().eval(&uniform(&g, y.clone())),
        rat(7, 4)
    );
    let g = fixture("k4");
    // 1 + 4Y^3 + 3Y^4
    assert_eq!(
        p_gamma(&g).unwrap().eval(&uniform(&g, y)),
        rat(16 + 8 + 3, 16)
    );
}
