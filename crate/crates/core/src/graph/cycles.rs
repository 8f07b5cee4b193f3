use super::PlanarGraph;
use crate::error::{Error, Result};

/// Default cap on `#E` for even-subgraph enumeration.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 40;

/// Subset of edges as a bitmask (edge ids below 64).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeSet(pub u64);

impl EdgeSet {
    pub fn contains(self, e: usize) -> bool {
        self.0 >> e & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let e = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(e)
        })
    }

    pub fn from_edges(edges: &[usize]) -> Self {
        EdgeSet(edges.iter().fold(0, |m, &e| m | 1 << e))
    }
}

/// Simple cycle, edges listed in walking order starting from the lowest id.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    edges: Vec<usize>,
    vertices: Vec<usize>,
    set: EdgeSet,
}

impl Cycle {
    pub fn from_edges(g: &PlanarGraph, edges: &[usize]) -> Result<Cycle> {
        let set = EdgeSet::from_edges(edges);
        if set.len() != edges.len() || set.is_empty() {
            return Err(Error::NotACycle("empty or repeated edge list".into()));
        }
        if let Some(&e) = edges.iter().find(|&&e| e >= g.num_edges()) {
            return Err(Error::NotACycle(format!("edge {} does not exist", e)));
        }
        let mut deg = vec![0usize; g.num_vertices()];
        for e in set.iter() {
            let (u, v) = g.edge_endpoints(e);
            deg[u] += 1;
            deg[v] += 1;
        }
        if let Some(v) = deg.iter().position(|&d| d != 0 && d != 2) {
            return Err(Error::NotACycle(format!(
                "vertex {} has degree {}",
                v, deg[v]
            )));
        }
        let first = set.iter().next().unwrap();
        let start = g.edge_endpoints(first).0;
        let mut order = vec![first];
        let mut verts = vec![start];
        let mut at = g.edge_endpoints(first).1;
        let mut prev = first;
        while at != start {
            verts.push(at);
            let next = g
                .vertex_halves(at)
                .into_iter()
                .map(|h| g.edge_of(h))
                .find(|&e| e != prev && set.contains(e))
                .expect("degree two");
            order.push(next);
            let (a, b) = g.edge_endpoints(next);
            at = if a == at { b } else { a };
            prev = next;
        }
        if order.len() != set.len() {
            return Err(Error::NotACycle("edge set has several components".into()));
        }
        Ok(Cycle {
            edges: order,
            vertices: verts,
            set,
        })
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.set
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Data of a cycle relative to the disc it bounds away from the outer face.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CycleStats {
    /// Cycle vertices whose third half-edge points into the disc.
    pub large_angles: usize,
    /// Cycle edges oriented clockwise around the disc.
    pub clockwise_edges: usize,
    pub interior_vertices: usize,
    pub interior_edges: usize,
    pub interior_faces: usize,
}

/// Statistics of `c` under the graph's stored orientation.
pub fn cycle_statistics(g: &PlanarGraph, c: &Cycle, outer_face: usize) -> Result<CycleStats> {
    if outer_face >= g.num_faces() {
        return Err(Error::Invalid(format!(
            "face {} does not exist",
            outer_face
        )));
    }
    let inside = g.interior_faces(c.edge_set(), outer_face);
    let on_cycle: Vec<bool> = {
        let mut m = vec![false; g.num_vertices()];
        for &v in c.vertices() {
            m[v] = true;
        }
        m
    };
    let mut stats = CycleStats {
        large_angles: 0,
        clockwise_edges: 0,
        interior_vertices: 0,
        interior_edges: 0,
        interior_faces: inside.iter().filter(|&&x| x).count(),
    };
    for v in 0..g.num_vertices() {
        let hs = g.vertex_halves(v);
        if on_cycle[v] {
            let third = hs
                .into_iter()
                .find(|&h| !c.edge_set().contains(g.edge_of(h)))
                .expect("trivalent vertex on a cycle has one free half-edge");
            if inside[g.face_of(third)] {
                stats.large_angles += 1;
            }
        } else if inside[g.face_of(hs[0])] {
            stats.interior_vertices += 1;
        }
    }
    for e in 0..g.num_edges() {
        let src = g.edge(e).src;
        if c.edge_set().contains(e) {
            // the face on the right of the source half is inside exactly when
            // the edge runs clockwise around the disc
            if inside[g.face_of(src)] {
                stats.clockwise_edges += 1;
            }
        } else if inside[g.face_of(src)] {
            stats.interior_edges += 1;
        }
    }
    Ok(stats)
}

impl PlanarGraph {
    /// Faces not reachable from `outer` without crossing `cut`.
    pub(crate) fn interior_faces(&self, cut: EdgeSet, outer: usize) -> Vec<bool> {
        let mut outside = vec![false; self.num_faces()];
        outside[outer] = true;
        let mut stack = vec![outer];
        while let Some(f) = stack.pop() {
            for &h in self.face(f) {
                if cut.contains(self.edge_of(h)) {
                    continue;
                }
                let g = self.face_of(self.twin(h));
                if !outside[g] {
                    outside[g] = true;
                    stack.push(g);
                }
            }
        }
        outside.into_iter().map(|o| !o).collect()
    }

    /// Fundamental cycles of a BFS spanning tree, one per co-tree edge.
    pub fn cycle_basis(&self) -> Vec<EdgeSet> {
        let n = self.num_vertices();
        let mut parent_edge = vec![usize::MAX; n];
        let mut depth = vec![usize::MAX; n];
        let mut tree = vec![false; self.num_edges()];
        depth[0] = 0;
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for h in self.vertex_halves(v) {
                let w = self.vertex_of(self.twin(h));
                if depth[w] == usize::MAX {
                    depth[w] = depth[v] + 1;
                    parent_edge[w] = self.edge_of(h);
                    tree[self.edge_of(h)] = true;
                    queue.push_back(w);
                }
            }
        }
        let up = |v: usize| {
            let (a, b) = self.edge_endpoints(parent_edge[v]);
            if a == v {
                b
            } else {
                a
            }
        };
        let mut basis = Vec::new();
        for e in 0..self.num_edges() {
            if tree[e] {
                continue;
            }
            let mut mask = 1u64 << e;
            let (mut a, mut b) = self.edge_endpoints(e);
            while a != b {
                if depth[a] >= depth[b] {
                    mask ^= 1 << parent_edge[a];
                    a = up(a);
                } else {
                    mask ^= 1 << parent_edge[b];
                    b = up(b);
                }
            }
            basis.push(EdgeSet(mask));
        }
        basis
    }

    pub fn enumerate_even_subgraphs(&self) -> Result<Vec<EdgeSet>> {
        self.enumerate_even_subgraphs_with_limit(DEFAULT_ENUMERATION_LIMIT)
    }

    /// All even subgraphs, via Gray-code walk over the cycle space. The first
    /// entry is the empty set.
    pub fn enumerate_even_subgraphs_with_limit(&self, limit: usize) -> Result<Vec<EdgeSet>> {
        let ne = self.num_edges();
        if ne > limit.min(63) {
            return Err(Error::SizeLimit {
                what: "edges for even-subgraph enumeration",
                actual: ne,
                limit: limit.min(63),
            });
        }
        let basis = self.cycle_basis();
        let count = 1usize << basis.len();
        let mut out = Vec::with_capacity(count);
        let mut cur = 0u64;
        out.push(EdgeSet(cur));
        for i in 1..count {
            cur ^= basis[i.trailing_zeros() as usize].0;
            out.push(EdgeSet(cur));
        }
        Ok(out)
    }

    /// Number of connected components with at least one edge.
    pub fn components(&self, s: EdgeSet) -> usize {
        let mut parent: Vec<usize> = (0..self.num_vertices()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut touched = vec![false; self.num_vertices()];
        for e in s.iter() {
            let (a, b) = self.edge_endpoints(e);
            touched[a] = true;
            touched[b] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..self.num_vertices())
            .filter(|&v| touched[v] && find(&mut parent, v) == v)
            .count()
    }

    /// Every simple cycle (connected nonempty even subgraph), sorted by mask.
    pub fn simple_cycles(&self) -> Result<Vec<Cycle>> {
        let mut sets: Vec<EdgeSet> = self
            .enumerate_even_subgraphs()?
            .into_iter()
            .filter(|s| !s.is_empty() && self.components(*s) == 1)
            .collect();
        sets.sort();
        sets.into_iter()
            .map(|s| Cycle::from_edges(self, &s.iter().collect::<Vec<_>>()))
            .collect()
    }

    /// The cycle bounding face `f`.
    pub fn face_cycle(&self, f: usize) -> Cycle {
        let edges: Vec<usize> = self.face(f).iter().map(|&h| self.edge_of(h)).collect();
        Cycle::from_edges(self, &edges).expect("faces of a bridgeless map are simple cycles")
    }
}
