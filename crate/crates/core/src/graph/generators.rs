use std::f64::consts::PI;

use super::PlanarGraph;
use crate::error::{Error, Result};

pub const GENERATOR_NAMES: [&str; 5] = ["theta", "k4", "prism3", "cube", "dodecahedron"];

/// Built-in sphere-embedded trivalent graphs.
///
/// Every generator except `theta` is a straight-line plane drawing; rotations
/// come from sorting neighbours by angle, so the first listed cycle is the
/// outer face of the picture. Edge `i` owns half-edges `2i` (source) and
/// `2i + 1` (target).
pub fn generate(name: &str) -> Result<PlanarGraph> {
    match name {
        "theta" => theta(),
        "k4" => k4(),
        "prism3" => prism(3),
        "cube" => prism(4),
        "dodecahedron" => dodecahedron(),
        other => Err(Error::UnsupportedGenerator(other.to_string())),
    }
}

fn theta() -> Result<PlanarGraph> {
    // u sees edges 0,1,2 counter-clockwise, so w sees them clockwise
    PlanarGraph::from_rotation(&[[0, 2, 4], [5, 3, 1]], &[(0, 1), (2, 3), (4, 5)])
}

fn polar(r: f64, deg: f64) -> (f64, f64) {
    let t = deg * PI / 180.0;
    (r * t.cos(), r * t.sin())
}

fn k4() -> Result<PlanarGraph> {
    let mut pos: Vec<(f64, f64)> = (0..3)
        .map(|i| polar(2.0, 90.0 + 120.0 * i as f64))
        .collect();
    pos.push((0.0, 0.0));
    let edges = [(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)];
    from_drawing(&pos, &edges)
}

fn prism(n: usize) -> Result<PlanarGraph> {
    let off = if n == 4 { 45.0 } else { 90.0 };
    let step = 360.0 / n as f64;
    let mut pos = Vec::new();
    for r in [2.0, 1.0] {
        for i in 0..n {
            pos.push(polar(r, off + step * i as f64));
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        edges.push((i, (i + 1) % n));
    }
    for i in 0..n {
        edges.push((n + i, n + (i + 1) % n));
    }
    for i in 0..n {
        edges.push((i, n + i));
    }
    from_drawing(&pos, &edges)
}

fn dodecahedron() -> Result<PlanarGraph> {
    // rings: outer pentagon A, spokes B, zigzag midpoints C, inner pentagon D
    let mut pos = Vec::new();
    for i in 0..5 {
        pos.push(polar(4.0, 90.0 + 72.0 * i as f64));
    }
    for i in 0..5 {
        pos.push(polar(3.0, 90.0 + 72.0 * i as f64));
    }
    for i in 0..5 {
        pos.push(polar(2.5, 126.0 + 72.0 * i as f64));
    }
    for i in 0..5 {
        pos.push(polar(1.2, 126.0 + 72.0 * i as f64));
    }
    let (a, b, c, d) = (0, 5, 10, 15);
    let mut edges = Vec::new();
    for i in 0..5 {
        edges.push((a + i, a + (i + 1) % 5));
    }
    for i in 0..5 {
        edges.push((a + i, b + i));
    }
    for i in 0..5 {
        edges.push((b + i, c + i));
        edges.push((c + i, b + (i + 1) % 5));
    }
    for i in 0..5 {
        edges.push((c + i, d + i));
    }
    for i in 0..5 {
        edges.push((d + i, d + (i + 1) % 5));
    }
    from_drawing(&pos, &edges)
}

/// Rotation system of a straight-line drawing of a simple graph.
fn from_drawing(pos: &[(f64, f64)], edges: &[(usize, usize)]) -> Result<PlanarGraph> {
    let mut around: Vec<Vec<(f64, usize)>> = vec![Vec::new(); pos.len()];
    for (e, &(u, v)) in edges.iter().enumerate() {
        for (h, from, to) in [(2 * e, u, v), (2 * e + 1, v, u)] {
            let dx = pos[to].0 - pos[from].0;
            let dy = pos[to].1 - pos[from].1;
            around[from].push((dy.atan2(dx), h));
        }
    }
    let mut rotation = Vec::with_capacity(pos.len());
    for (v, mut hs) in around.into_iter().enumerate() {
        if hs.len() != 3 {
            return Err(Error::Topology(format!(
                "vertex {} has degree {}",
                v,
                hs.len()
            )));
        }
        hs.sort_by(|a, b| a.0.total_cmp(&b.0));
        rotation.push([hs[0].1, hs[1].1, hs[2].1]);
    }
    let pairs: Vec<(usize, usize)> = (0..edges.len()).map(|e| (2 * e, 2 * e + 1)).collect();
    PlanarGraph::from_rotation(&rotation, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let expect = [
            ("theta", 2, 3, 3),
            ("k4", 4, 6, 4),
            ("prism3", 6, 9, 5),
            ("cube", 8, 12, 6),
            ("dodecahedron", 20, 30, 12),
        ];
        for (name, v, e, f) in expect {
            let g = generate(name).unwrap();
            assert_eq!(
                (g.num_vertices(), g.num_edges(), g.num_faces()),
                (v, e, f),
                "{}",
                name
            );
        }
    }

    #[test]
    fn face_sizes() {
        let sizes = |name| {
            let g = generate(name).unwrap();
            let mut s: Vec<usize> = g.faces().iter().map(|f| f.len()).collect();
            s.sort();
            s
        };
        assert_eq!(sizes("theta"), vec![2, 2, 2]);
        assert_eq!(sizes("k4"), vec![3; 4]);
        assert_eq!(sizes("prism3"), vec![3, 3, 4, 4, 4]);
        assert_eq!(sizes("cube"), vec![4; 6]);
        assert_eq!(sizes("dodecahedron"), vec![5; 12]);
    }

    #[test]
    fn torus_rejected() {
        assert!(matches!(
            generate("honeycomb_torus"),
            Err(Error::UnsupportedGenerator(_))
        ));
    }

    #[test]
    fn deterministic() {
        for name in GENERATOR_NAMES {
            assert_eq!(
                generate(name).unwrap().to_text(),
                generate(name).unwrap().to_text()
            );
        }
    }
}
