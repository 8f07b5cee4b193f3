use std::collections::VecDeque;

use super::PlanarGraph;

/// Lexicographically least relabelling code over all root half-edges. Two
/// connected maps share it iff an orientation-preserving isomorphism exists.
pub(super) fn canonical_form(g: &PlanarGraph) -> String {
    let best = (0..g.num_half_edges())
        .map(|root| code_from(g, root))
        .min()
        .unwrap_or_default();
    let body: Vec<String> = best.iter().map(|(n, t)| format!("{}:{}", n, t)).collect();
    format!(
        "V{}E{}[{}]",
        g.num_vertices(),
        g.num_edges(),
        body.join(" ")
    )
}

fn code_from(g: &PlanarGraph, root: usize) -> Vec<(usize, usize)> {
    let n = g.num_half_edges();
    let mut label = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    label[root] = 0;
    order.push(root);
    queue.push_back(root);
    while let Some(h) = queue.pop_front() {
        for x in [g.next_ccw(h), g.twin(h)] {
            if label[x] == usize::MAX {
                label[x] = order.len();
                order.push(x);
                queue.push_back(x);
            }
        }
    }
    order
        .iter()
        .map(|&h| (label[g.next_ccw(h)], label[g.twin(h)]))
        .collect()
}

#[cfg(test)]
mod tests {
    use crate::graph::{generate, load_graph, GENERATOR_NAMES};

    #[test]
    fn relabelling_invariant() {
        // theta with shuffled ids
        let a = generate("theta").unwrap();
        let b = load_graph(
            "vertex 3 11 13 15\nvertex 1 14 12 10\nedge 0 10 11\nedge 5 13 12\nedge 2 15 14\n",
        )
        .unwrap();
        assert_eq!(a.canonical_form(), b.canonical_form());
    }

    #[test]
    fn generators_distinct() {
        let forms: Vec<String> = GENERATOR_NAMES
            .iter()
            .map(|n| generate(n).unwrap().canonical_form())
            .collect();
        for i in 0..forms.len() {
            for j in i + 1..forms.len() {
                assert_ne!(forms[i], forms[j]);
            }
        }
    }
}
