//! Small hand-built graphs used by tests, docs, and the guide.

use crate::graph::{Sign, SignedGraph};

pub fn graph(names: &[&str], sink: usize, edges: &[(usize, usize, Sign)]) -> SignedGraph {
    SignedGraph::new(
        names.iter().map(|s| s.to_string()).collect(),
        sink,
        edges.to_vec(),
    )
    .expect("fixture graph is well formed")
}

/// 4-cycle with a chord to the universal sink and one negative edge;
/// reduced signed Laplacian [[2,1,0],[1,3,-1],[0,-1,2]], det 8.
pub fn example_g_phi() -> SignedGraph {
    graph(
        &["v1", "v2", "v3", "q"],
        3,
        &[
            (0, 1, Sign::Negative),
            (1, 2, Sign::Positive),
            (0, 3, Sign::Positive),
            (1, 3, Sign::Positive),
            (2, 3, Sign::Positive),
        ],
    )
}

/// 4-cycle with a chord between nonsink vertices and one negative edge;
/// reduced signed Laplacian [[3,1,-1],[1,2,-1],[-1,-1,3]], det 12. The
/// sink is not adjacent to v2.
pub fn example_h_phi() -> SignedGraph {
    graph(
        &["v1", "v2", "v3", "q"],
        3,
        &[
            (0, 1, Sign::Negative),
            (1, 2, Sign::Positive),
            (0, 2, Sign::Positive),
            (0, 3, Sign::Positive),
            (2, 3, Sign::Positive),
        ],
    )
}

/// Triangle with sink q and a negative edge between the nonsink pair.
pub fn negative_triangle() -> SignedGraph {
    graph(
        &["q", "v1", "v2"],
        0,
        &[(0, 1, Sign::Positive), (0, 2, Sign::Positive), (1, 2, Sign::Negative)],
    )
}

/// All-positive triangle with sink q.
pub fn positive_triangle() -> SignedGraph {
    graph(
        &["q", "v1", "v2"],
        0,
        &[(0, 1, Sign::Positive), (0, 2, Sign::Positive), (1, 2, Sign::Positive)],
    )
}

/// Diamond (complete graph on four vertices minus one edge), sink at a
/// degree-3 vertex, signs chosen per `interior_signs` for the edges not
/// incident to the sink, in sorted edge order.
pub fn diamond(interior_signs: &[Sign]) -> SignedGraph {
    assert_eq!(interior_signs.len(), 2);
    graph(
        &["q", "v1", "v2", "v3"],
        0,
        &[
            (0, 1, Sign::Positive),
            (0, 2, Sign::Positive),
            (0, 3, Sign::Positive),
            (1, 2, interior_signs[0]),
            (2, 3, interior_signs[1]),
        ],
    )
}
