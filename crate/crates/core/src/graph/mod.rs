//! Planar trivalent multigraphs as half-edge rotation systems on the sphere.

mod canonical;
mod cycles;
mod generators;
mod io;

pub use cycles::{cycle_statistics, Cycle, CycleStats, EdgeSet, DEFAULT_ENUMERATION_LIMIT};
pub use generators::{generate, GENERATOR_NAMES};
pub use io::load_graph;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HalfEdge {
    pub twin: usize,
    pub vertex: usize,
    pub next_ccw: usize,
}

/// An edge as the pair (source half-edge, target half-edge) under the current
/// orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub anchor: usize,
}

/// Ordered pair of half-edges at one vertex, `t` the ccw successor of `s`.
/// Angles are indexed by their `s` half-edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Angle {
    pub vertex: usize,
    pub s_half: usize,
    pub t_half: usize,
}

/// Per-edge direction flags relative to the stored `(src, dst)` order:
/// `true` means reversed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Orientation(pub Vec<bool>);

impl Orientation {
    pub fn stored(g: &PlanarGraph) -> Self {
        Orientation(vec![false; g.num_edges()])
    }

    pub fn from_mask(num_edges: usize, mask: u64) -> Self {
        Orientation((0..num_edges).map(|e| mask >> e & 1 == 1).collect())
    }

    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0, |m, (e, &r)| if r { m | 1 << e } else { m })
    }

    pub fn flip_edge(&mut self, e: usize) {
        self.0[e] = !self.0[e];
    }
}

/// Immutable embedded trivalent graph. Faces are the orbits of
/// `h -> next_ccw(twin(h))`; each half-edge of an orbit has the face on its
/// right, so bounded faces of a plane drawing are traced clockwise.
#[derive(Clone, Debug)]
pub struct PlanarGraph {
    half_edges: Vec<HalfEdge>,
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    edge_of: Vec<usize>,
    face_of: Vec<usize>,
    faces: Vec<Vec<usize>>,
    vertex_labels: Vec<u64>,
    edge_labels: Vec<u64>,
    half_labels: Vec<u64>,
}

impl PlanarGraph {
    /// Builds and validates a graph from dense half-edge data. `rotation[v]`
    /// lists the three half-edges at `v` counter-clockwise; `edges[e]` is the
    /// oriented twin pair.
    pub fn from_rotation(rotation: &[[usize; 3]], edges: &[(usize, usize)]) -> Result<Self> {
        let nh = 2 * edges.len();
        Self::build(
            rotation,
            edges,
            (0..rotation.len() as u64).collect(),
            (0..edges.len() as u64).collect(),
            (0..nh as u64).collect(),
        )
    }

    pub(crate) fn build(
        rotation: &[[usize; 3]],
        edges: &[(usize, usize)],
        vertex_labels: Vec<u64>,
        edge_labels: Vec<u64>,
        half_labels: Vec<u64>,
    ) -> Result<Self> {
        let nh = 2 * edges.len();
        if rotation.len() * 3 != nh {
            return Err(Error::Topology(format!(
                "{} vertices need {} half-edges, edges supply {}",
                rotation.len(),
                rotation.len() * 3,
                nh
            )));
        }
        let mut he = vec![
            HalfEdge {
                twin: usize::MAX,
                vertex: usize::MAX,
                next_ccw: usize::MAX,
            };
            nh
        ];
        for (v, rot) in rotation.iter().enumerate() {
            for k in 0..3 {
                let h = rot[k];
                if h >= nh {
                    return Err(Error::Topology(format!("half-edge {} out of range", h)));
                }
                if he[h].vertex != usize::MAX {
                    return Err(Error::Topology(format!(
                        "half-edge {} appears at two vertex slots",
                        half_labels[h]
                    )));
                }
                he[h].vertex = v;
                he[h].next_ccw = rot[(k + 1) % 3];
            }
        }
        let mut edge_of = vec![usize::MAX; nh];
        for (e, &(s, t)) in edges.iter().enumerate() {
            if s == t || s >= nh || t >= nh {
                return Err(Error::Topology(format!(
                    "edge {} has invalid halves",
                    edge_labels[e]
                )));
            }
            for h in [s, t] {
                if edge_of[h] != usize::MAX {
                    return Err(Error::Topology(format!(
                        "half-edge {} belongs to two edges",
                        half_labels[h]
                    )));
                }
                edge_of[h] = e;
            }
            he[s].twin = t;
            he[t].twin = s;
        }
        let vertices = rotation.iter().map(|r| Vertex { anchor: r[0] }).collect();
        let mut g = PlanarGraph {
            half_edges: he,
            edges: edges.iter().map(|&(src, dst)| Edge { src, dst }).collect(),
            vertices,
            edge_of,
            face_of: vec![usize::MAX; nh],
            faces: Vec::new(),
            vertex_labels,
            edge_labels,
            half_labels,
        };
        g.trace_faces();
        g.validate()?;
        Ok(g)
    }

    fn trace_faces(&mut self) {
        for start in 0..self.half_edges.len() {
            if self.face_of[start] != usize::MAX {
                continue;
            }
            let f = self.faces.len();
            let mut orbit = Vec::new();
            let mut h = start;
            loop {
                self.face_of[h] = f;
                orbit.push(h);
                h = self.face_next(h);
                if h == start {
                    break;
                }
            }
            self.faces.push(orbit);
        }
    }

    fn validate(&self) -> Result<()> {
        if self.vertices.is_empty() {
            return Err(Error::Topology("graph has no vertices".into()));
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for h in self.vertex_halves(v) {
                let w = self.half_edges[self.twin(h)].vertex;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        if let Some(v) = seen.iter().position(|s| !s) {
            return Err(Error::Topology(format!(
                "graph is disconnected: vertex {} unreachable",
                self.vertex_labels[v]
            )));
        }
        for (e, edge) in self.edges.iter().enumerate() {
            if self.face_of[edge.src] == self.face_of[edge.dst] {
                return Err(Error::Topology(format!(
                    "edge {} is a bridge (same face on both sides)",
                    self.edge_labels[e]
                )));
            }
        }
        let chi = self.num_vertices() as i64 - self.num_edges() as i64 + self.num_faces() as i64;
        if chi != 2 {
            return Err(Error::Topology(format!(
                "embedding is not spherical: V - E + F = {}",
                chi
            )));
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_edges.len()
    }

    pub fn half_edge(&self, h: usize) -> &HalfEdge {
        &self.half_edges[h]
    }

    pub fn half_edges(&self) -> &[HalfEdge] {
        &self.half_edges
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> Edge {
        self.edges[e]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn twin(&self, h: usize) -> usize {
        self.half_edges[h].twin
    }

    pub fn next_ccw(&self, h: usize) -> usize {
        self.half_edges[h].next_ccw
    }

    pub fn prev_ccw(&self, h: usize) -> usize {
        self.next_ccw(self.next_ccw(h))
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.half_edges[h].vertex
    }

    pub fn edge_of(&self, h: usize) -> usize {
        self.edge_of[h]
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    /// Successor of `h` along its face.
    pub fn face_next(&self, h: usize) -> usize {
        self.next_ccw(self.twin(h))
    }

    pub fn face(&self, f: usize) -> &[usize] {
        &self.faces[f]
    }

    pub fn faces(&self) -> &[Vec<usize>] {
        &self.faces
    }

    /// The three half-edges at `v`, counter-clockwise from the anchor.
    pub fn vertex_halves(&self, v: usize) -> [usize; 3] {
        let a = self.vertices[v].anchor;
        let b = self.next_ccw(a);
        [a, b, self.next_ccw(b)]
    }

    pub fn edge_endpoints(&self, e: usize) -> (usize, usize) {
        let Edge { src, dst } = self.edges[e];
        (self.vertex_of(src), self.vertex_of(dst))
    }

    /// Source half-edge of `e` under orientation `o`.
    pub fn source_half(&self, o: &Orientation, e: usize) -> usize {
        if o.0[e] {
            self.edges[e].dst
        } else {
            self.edges[e].src
        }
    }

    pub fn target_half(&self, o: &Orientation, e: usize) -> usize {
        self.twin(self.source_half(o, e))
    }

    /// Every angle; angle `h` has `s_half = h`.
    pub fn angles(&self) -> Vec<Angle> {
        (0..self.num_half_edges()).map(|h| self.angle(h)).collect()
    }

    pub fn angle(&self, h: usize) -> Angle {
        Angle {
            vertex: self.vertex_of(h),
            s_half: h,
            t_half: self.next_ccw(h),
        }
    }

    /// Same embedding with the stored orientation replaced by `o`.
    pub fn with_orientation(&self, o: &Orientation) -> PlanarGraph {
        let mut g = self.clone();
        for e in 0..g.edges.len() {
            if o.0[e] {
                let Edge { src, dst } = g.edges[e];
                g.edges[e] = Edge { src: dst, dst: src };
            }
        }
        g
    }

    pub fn vertex_label(&self, v: usize) -> u64 {
        self.vertex_labels[v]
    }

    pub fn edge_label(&self, e: usize) -> u64 {
        self.edge_labels[e]
    }

    pub fn half_label(&self, h: usize) -> u64 {
        self.half_labels[h]
    }

    /// Canonical string of the unoriented embedding, equal for two graphs
    /// exactly when they are related by an orientation-preserving map
    /// isomorphism.
    pub fn canonical_form(&self) -> String {
        canonical::canonical_form(self)
    }

    pub fn to_text(&self) -> String {
        io::to_text(self)
    }

    /// Face with the most sides, lowest id among ties. Used as the default
    /// outer face when a query needs one.
    pub fn largest_face(&self) -> usize {
        let mut best = 0;
        for f in 1..self.faces.len() {
            if self.faces[f].len() > self.faces[best].len() {
                best = f;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twin_is_fixed_point_free_involution() {
        for name in GENERATOR_NAMES {
            let g = generate(name).unwrap();
            for h in 0..g.num_half_edges() {
                assert_ne!(g.twin(h), h);
                assert_eq!(g.twin(g.twin(h)), h);
                assert_eq!(g.next_ccw(g.next_ccw(g.next_ccw(h))), h);
            }
            let total: usize = g.faces().iter().map(|f| f.len()).sum();
            assert_eq!(total, g.num_half_edges());
        }
    }

    #[test]
    fn angles_per_vertex() {
        let g = generate("k4").unwrap();
        let angles = g.angles();
        assert_eq!(angles.len(), 12);
        for a in angles {
            assert_ne!(a.s_half, a.t_half);
            assert_eq!(g.vertex_of(a.t_half), a.vertex);
        }
    }
}
