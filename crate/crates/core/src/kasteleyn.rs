//! Kasteleyn orientations: construction, checking, vertex flips and the
//! cycle sign lemma.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use crate::error::{Error, Result};
use crate::graph::{cycle_statistics, CycleStats, Orientation, PlanarGraph};

/// Number of edges of face `f` oriented along its traversal, i.e. clockwise
/// for a bounded face of a plane drawing and counter-clockwise for the
/// outer one.
pub fn clockwise_count(g: &PlanarGraph, o: &Orientation, f: usize) -> usize {
    g.face(f)
        .iter()
        .filter(|&&h| g.source_half(o, g.edge_of(h)) == h)
        .count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KasteleynReport {
    pub is_kasteleyn: bool,
    /// Clockwise count per face id.
    pub face_counts: Vec<usize>,
}

pub fn is_kasteleyn(g: &PlanarGraph, o: &Orientation) -> KasteleynReport {
    let face_counts: Vec<usize> = (0..g.num_faces())
        .map(|f| clockwise_count(g, o, f))
        .collect();
    KasteleynReport {
        is_kasteleyn: face_counts.iter().all(|c| c % 2 == 1),
        face_counts,
    }
}

/// Kasteleyn orientation rooted at the largest face.
pub fn make_kasteleyn(g: &PlanarGraph) -> Result<Orientation> {
    make_kasteleyn_rooted(g, g.largest_face())
}

/// Keeps a BFS spanning tree at its stored orientation, then fixes co-tree
/// edges leaf-to-root along the dual tree grown from `outer`.
pub fn make_kasteleyn_rooted(g: &PlanarGraph, outer: usize) -> Result<Orientation> {
    if g.num_vertices() % 2 == 1 {
        return Err(Error::OddVertexCount(g.num_vertices()));
    }
    let mut tree = vec![false; g.num_edges()];
    let mut seen = vec![false; g.num_vertices()];
    seen[0] = true;
    let mut queue = VecDeque::from([0usize]);
    while let Some(v) = queue.pop_front() {
        for h in g.vertex_halves(v) {
            let w = g.vertex_of(g.twin(h));
            if !seen[w] {
                seen[w] = true;
                tree[g.edge_of(h)] = true;
                queue.push_back(w);
            }
        }
    }

    // dual BFS across co-tree edges; neighbours visited in ascending face id
    let mut parent_edge = vec![usize::MAX; g.num_faces()];
    let mut visited = vec![false; g.num_faces()];
    let mut order = Vec::with_capacity(g.num_faces());
    visited[outer] = true;
    let mut queue = VecDeque::from([outer]);
    while let Some(f) = queue.pop_front() {
        order.push(f);
        let mut nbrs: Vec<(usize, usize)> = g
            .face(f)
            .iter()
            .filter(|&&h| !tree[g.edge_of(h)])
            .map(|&h| (g.face_of(g.twin(h)), g.edge_of(h)))
            .collect();
        nbrs.sort();
        for (nf, e) in nbrs {
            if !visited[nf] {
                visited[nf] = true;
                parent_edge[nf] = e;
                queue.push_back(nf);
            }
        }
    }

    let mut o = Orientation::stored(g);
    for &f in order.iter().rev() {
        let e = parent_edge[f];
        if e == usize::MAX {
            continue;
        }
        if clockwise_count(g, &o, f) % 2 == 0 {
            o.flip_edge(e);
        }
    }
    debug_assert!(is_kasteleyn(g, &o).is_kasteleyn);
    Ok(o)
}

/// Reverses every edge at `v`.
pub fn vertex_flip(g: &PlanarGraph, o: &Orientation, v: usize) -> Orientation {
    let mut out = o.clone();
    for h in g.vertex_halves(v) {
        out.flip_edge(g.edge_of(h));
    }
    out
}

/// Applies the flips of every vertex in the bitmask `vertices`.
pub fn flip_vertices(g: &PlanarGraph, o: &Orientation, vertices: u64) -> Orientation {
    let mut out = o.clone();
    for v in 0..g.num_vertices() {
        if vertices >> v & 1 == 1 {
            out = vertex_flip(g, &out, v);
        }
    }
    out
}

/// The vertex-flip class of `o`, as sorted orientation masks.
pub fn flip_orbit(g: &PlanarGraph, o: &Orientation) -> Result<BTreeSet<u64>> {
    if g.num_vertices() > 24 {
        return Err(Error::SizeLimit {
            what: "vertices for flip-orbit enumeration",
            actual: g.num_vertices(),
            limit: 24,
        });
    }
    Ok((0..1u64 << g.num_vertices())
        .map(|s| flip_vertices(g, o, s).to_mask())
        .collect())
}

/// Every Kasteleyn orientation, by scanning all `2^#E` assignments.
pub fn all_kasteleyn_orientations(g: &PlanarGraph) -> Result<BTreeSet<u64>> {
    if g.num_edges() > 24 {
        return Err(Error::SizeLimit {
            what: "edges for orientation scan",
            actual: g.num_edges(),
            limit: 24,
        });
    }
    Ok((0..1u64 << g.num_edges())
        .filter(|&m| is_kasteleyn(g, &Orientation::from_mask(g.num_edges(), m)).is_kasteleyn)
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleViolation {
    pub cycle: Vec<usize>,
    pub outer_face: usize,
    pub stats: CycleStats,
    /// `true` for the clockwise-edge identity, `false` for the large-angle one.
    pub clockwise_identity: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleLemmaReport {
    pub cycles_checked: usize,
    pub violation: Option<CycleViolation>,
}

impl CycleLemmaReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Checks `(-1)^#E_cl(c) = (-1)^(#V_int(c) + 1)` and
/// `(-1)^a(c) = (-1)^#V_int(c)` for every simple cycle, taking each side of
/// the cycle in turn as the interior.
pub fn check_cycle_lemma(g: &PlanarGraph, o: &Orientation) -> Result<CycleLemmaReport> {
    let oriented = g.with_orientation(o);
    let cycles = g.simple_cycles()?;
    for c in &cycles {
        let h = g.edge(c.edges()[0]).src;
        for outer in [g.face_of(h), g.face_of(g.twin(h))] {
            let stats = cycle_statistics(&oriented, c, outer)?;
            let cw_ok = stats.clockwise_edges % 2 != stats.interior_vertices % 2;
            let angle_ok = stats.large_angles % 2 == stats.interior_vertices % 2;
            if !(cw_ok && angle_ok) {
                return Ok(CycleLemmaReport {
                    cycles_checked: cycles.len(),
                    violation: Some(CycleViolation {
                        cycle: c.edges().to_vec(),
                        outer_face: outer,
                        stats,
                        clockwise_identity: !cw_ok,
                    }),
                });
            }
        }
    }
    Ok(CycleLemmaReport {
        cycles_checked: cycles.len(),
        violation: None,
    })
}

/// `edge <eid> <src_vid> <dst_vid>` lines.
pub fn orientation_text(g: &PlanarGraph, o: &Orientation) -> String {
    let mut s = String::new();
    for e in 0..g.num_edges() {
        let src = g.vertex_of(g.source_half(o, e));
        let dst = g.vertex_of(g.target_half(o, e));
        writeln!(
            s,
            "edge {} {} {}",
            g.edge_label(e),
            g.vertex_label(src),
            g.vertex_label(dst)
        )
        .unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GENERATOR_NAMES};

    #[test]
    fn constructed_orientations_are_kasteleyn() {
        for name in GENERATOR_NAMES {
            let g = generate(name).unwrap();
            let o = make_kasteleyn(&g).unwrap();
            assert!(is_kasteleyn(&g, &o).is_kasteleyn, "{}", name);
            for outer in 0..g.num_faces() {
                let o = make_kasteleyn_rooted(&g, outer).unwrap();
                assert!(is_kasteleyn(&g, &o).is_kasteleyn);
            }
        }
    }

    #[test]
    fn single_edge_flip_breaks_two_faces() {
        let g = generate("cube").unwrap();
        let mut o = make_kasteleyn(&g).unwrap();
        o.flip_edge(3);
        let r = is_kasteleyn(&g, &o);
        assert!(!r.is_kasteleyn);
        assert_eq!(r.face_counts.iter().filter(|c| *c % 2 == 0).count(), 2);
    }

    #[test]
    fn theta_all_one_way() {
        // stored theta orientation runs every edge from u to w
        let g = generate("theta").unwrap();
        let r = is_kasteleyn(&g, &Orientation::stored(&g));
        assert_eq!(r.face_counts, vec![1, 1, 1]);
        assert!(r.is_kasteleyn);
    }

    #[test]
    fn flips_are_involutions() {
        let g = generate("k4").unwrap();
        let o = make_kasteleyn(&g).unwrap();
        assert_eq!(vertex_flip(&g, &vertex_flip(&g, &o, 2), 2), o);
        let all = (1u64 << g.num_vertices()) - 1;
        assert_eq!(flip_vertices(&g, &o, all), o);
        for v in 0..4 {
            assert!(is_kasteleyn(&g, &vertex_flip(&g, &o, v)).is_kasteleyn);
        }
    }

    #[test]
    fn orbit_is_the_whole_class() {
        for name in ["theta", "k4", "prism3", "cube"] {
            let g = generate(name).unwrap();
            let o = make_kasteleyn(&g).unwrap();
            assert_eq!(
                flip_orbit(&g, &o).unwrap(),
                all_kasteleyn_orientations(&g).unwrap(),
                "{}",
                name
            );
        }
    }

    #[test]
    fn lemma_on_fixtures() {
        for name in ["theta", "k4", "prism3", "cube"] {
            let g = generate(name).unwrap();
            let o = make_kasteleyn(&g).unwrap();
            let r = check_cycle_lemma(&g, &o).unwrap();
            assert!(r.passed(), "{} {:?}", name, r.violation);
        }
    }

    #[test]
    fn corrupted_orientation_reported() {
        let g = generate("k4").unwrap();
        let mut o = make_kasteleyn(&g).unwrap();
        o.flip_edge(0);
        let r = check_cycle_lemma(&g, &o).unwrap();
        let v = r.violation.expect("violation");
        assert!(v.clockwise_identity);
        assert!(v.cycle.contains(&0));
    }

    #[test]
    fn orientation_lines() {
        let g = generate("theta").unwrap();
        let o = Orientation::stored(&g);
        assert_eq!(
            orientation_text(&g, &o),
            "edge 0 0 1\nedge 1 0 1\nedge 2 0 1\n"
        );
    }
}
