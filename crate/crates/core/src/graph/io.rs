use std::collections::BTreeMap;
use std::fmt::Write;

use super::PlanarGraph;
use crate::error::{Error, Result};

/// Parses the line-oriented graph format:
///
/// ```text
/// # theta graph
/// vertex 0 0 2 4
/// vertex 1 5 3 1
/// edge 0 0 1
/// edge 1 2 3
/// edge 2 4 5
/// ```
///
/// `vertex` lists half-edges counter-clockwise, `edge` pairs twins as
/// (source, target). Ids are dense-packed in ascending order internally; the
/// original labels are kept for output.
pub fn load_graph(text: &str) -> Result<PlanarGraph> {
    let mut vertices: BTreeMap<u64, (usize, [u64; 3])> = BTreeMap::new();
    let mut edges: BTreeMap<u64, (usize, u64, u64)> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let kind = tok.next().unwrap();
        let nums: Vec<u64> = tok
            .map(|t| {
                t.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("`{}` is not a nonnegative integer id", t),
                })
            })
            .collect::<Result<_>>()?;
        let bad_arity = |want: usize| Error::Parse {
            line: line_no,
            msg: format!("`{}` expects {} ids, found {}", kind, want, nums.len()),
        };
        match kind {
            "vertex" => {
                if nums.len() != 4 {
                    return Err(bad_arity(4));
                }
                if vertices
                    .insert(nums[0], (line_no, [nums[1], nums[2], nums[3]]))
                    .is_some()
                {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("duplicate vertex id {}", nums[0]),
                    });
                }
            }
            "edge" => {
                if nums.len() != 3 {
                    return Err(bad_arity(3));
                }
                if edges.insert(nums[0], (line_no, nums[1], nums[2])).is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("duplicate edge id {}", nums[0]),
                    });
                }
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown record `{}`", other),
                })
            }
        }
    }

    let mut half_index: BTreeMap<u64, usize> = BTreeMap::new();
    for (_, (line, hs)) in &vertices {
        for &h in hs {
            if half_index.insert(h, 0).is_some() {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("duplicate half-edge id {}", h),
                });
            }
        }
    }
    for (i, v) in half_index.values_mut().enumerate() {
        *v = i;
    }
    let half_labels: Vec<u64> = half_index.keys().copied().collect();
    let rotation: Vec<[usize; 3]> = vertices
        .values()
        .map(|(_, hs)| hs.map(|h| half_index[&h]))
        .collect();
    let mut pairs = Vec::with_capacity(edges.len());
    for (eid, (line, s, t)) in &edges {
        let look = |h: &u64| {
            half_index.get(h).copied().ok_or_else(|| {
                Error::Topology(format!(
                    "edge {} (line {}) uses half-edge {} not attached to any vertex",
                    eid, line, h
                ))
            })
        };
        pairs.push((look(s)?, look(t)?));
    }
    PlanarGraph::build(
        &rotation,
        &pairs,
        vertices.keys().copied().collect(),
        edges.keys().copied().collect(),
        half_labels,
    )
}

pub(super) fn to_text(g: &PlanarGraph) -> String {
    let mut s = String::new();
    for v in 0..g.num_vertices() {
        let [a, b, c] = g.vertex_halves(v);
        writeln!(
            s,
            "vertex {} {} {} {}",
            g.vertex_label(v),
            g.half_label(a),
            g.half_label(b),
            g.half_label(c)
        )
        .unwrap();
    }
    for e in 0..g.num_edges() {
        let edge = g.edge(e);
        writeln!(
            s,
            "edge {} {} {}",
            g.edge_label(e),
            g.half_label(edge.src),
            g.half_label(edge.dst)
        )
        .unwrap();
    }
    s
}
