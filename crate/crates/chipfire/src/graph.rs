//! Signed graphs with a designated sink.
//!
//! A signed graph is a simple graph whose edges carry a `+` or `-` label.
//! The sink vertex is the one whose row and column are deleted when
//! forming the reduced Laplacians. Vertex switching flips the sign of
//! every edge at one vertex; two graphs are switching equivalent when a
//! sequence of switches turns one into the other, and each switching
//! class has a canonical representative that is all-positive on a fixed
//! spanning tree.
//!
//! ```
//! use chipfire::graph::{Sign, SignedGraph};
//! // triangle with sink q and one negative edge between the nonsink vertices
//! let g = SignedGraph::new(
//!     vec!["q".into(), "v1".into(), "v2".into()],
//!     0,
//!     vec![(0, 1, Sign::Positive), (0, 2, Sign::Positive), (1, 2, Sign::Negative)],
//! ).unwrap();
//! let (l, _m) = g.reduced_laplacians().unwrap();
//! assert_eq!(l.det().unwrap(), 3.into());
//! assert!(!g.is_balanced().unwrap());
//! ```

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::linalg::IntMatrix;

pub const TU_EDGE_GUARD: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Positive,
    Negative,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Positive => Sign::Negative,
            Sign::Negative => Sign::Positive,
        }
    }

    pub fn mul(self, other: Sign) -> Sign {
        if self == other {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// Simple signed graph with a sink. Edges are stored with `u < v`,
/// sorted, no loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedGraph {
    vertex_names: Vec<String>,
    sink: usize,
    edges: Vec<(usize, usize, Sign)>,
}

/// Result of the TU-subgraph count: total weighted sum and the number of
/// spanning TU-subgraphs per count of unicyclic components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TUCount {
    pub total: BigInt,
    pub by_cycle_count: BTreeMap<usize, BigInt>,
}

impl SignedGraph {
    pub fn new(
        vertex_names: Vec<String>,
        sink: usize,
        edges: Vec<(usize, usize, Sign)>,
    ) -> Result<Self> {
        let n = vertex_names.len();
        if sink >= n {
            return Err(Error::UnknownVertex(format!("sink index {sink}")));
        }
        let mut norm: Vec<(usize, usize, Sign)> = Vec::with_capacity(edges.len());
        for (u, v, s) in edges {
            if u >= n || v >= n {
                return Err(Error::UnknownVertex(format!("edge endpoint {}", u.max(v))));
            }
            if u == v {
                return Err(Error::Precondition(format!("loop at vertex {u}")));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            norm.push((a, b, s));
        }
        norm.sort_by_key(|&(u, v, _)| (u, v));
        for w in norm.windows(2) {
            if (w[0].0, w[0].1) == (w[1].0, w[1].1) {
                return Err(Error::Precondition(format!(
                    "parallel edge {}-{}",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(SignedGraph { vertex_names, sink, edges: norm })
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertex_names
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn edges(&self) -> &[(usize, usize, Sign)] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_names.len()
    }

    /// Nonsink vertex indices in declaration order; this fixes the row
    /// order of the reduced Laplacians and of configurations.
    pub fn nonsink_vertices(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| v != self.sink).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b, _)| a == v || b == v).count()
    }

    /// Degrees of nonsink vertices in Laplacian order.
    pub fn nonsink_degrees(&self) -> Vec<BigInt> {
        self.nonsink_vertices()
            .into_iter()
            .map(|v| BigInt::from(self.degree(v)))
            .collect()
    }

    pub fn neighbors(&self, v: usize) -> Vec<(usize, Sign)> {
        let mut out: Vec<(usize, Sign)> = self
            .edges
            .iter()
            .filter_map(|&(a, b, s)| {
                if a == v {
                    Some((b, s))
                } else if b == v {
                    Some((a, s))
                } else {
                    None
                }
            })
            .collect();
        out.sort_by_key(|&(w, _)| w);
        out
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Connectivity of the graph with the sink removed.
    pub fn is_nonsink_connected(&self) -> bool {
        let nonsink = self.nonsink_vertices();
        if nonsink.is_empty() {
            return true;
        }
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        seen[self.sink] = true; // excluded
        let start = nonsink[0];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        nonsink.into_iter().all(|v| seen[v])
    }

    /// Reduced signed Laplacian `L` and reduced Laplacian `M` of the
    /// underlying graph, indexed by nonsink declaration order.
    pub fn reduced_laplacians(&self) -> Result<(IntMatrix, IntMatrix)> {
        let nonsink = self.nonsink_vertices();
        let n = nonsink.len();
        if n == 0 {
            return Err(Error::Dimension("graph has no nonsink vertices".into()));
        }
        let pos: Vec<Option<usize>> = {
            let mut p = vec![None; self.vertex_count()];
            for (i, &v) in nonsink.iter().enumerate() {
                p[v] = Some(i);
            }
            p
        };
        let mut l = IntMatrix::zero(n, n);
        let mut m = IntMatrix::zero(n, n);
        for (i, &v) in nonsink.iter().enumerate() {
            l[(i, i)] = BigInt::from(self.degree(v));
            m[(i, i)] = BigInt::from(self.degree(v));
        }
        for &(u, v, s) in &self.edges {
            if let (Some(i), Some(j)) = (pos[u], pos[v]) {
                let off = match s {
                    Sign::Positive => BigInt::from(-1),
                    Sign::Negative => BigInt::from(1),
                };
                l[(i, j)] = off.clone();
                l[(j, i)] = off;
                m[(i, j)] = BigInt::from(-1);
                m[(j, i)] = BigInt::from(-1);
            }
        }
        Ok((l, m))
    }

    /// Flips the sign of every edge incident to `v`.
    pub fn switch_vertex(&self, v: usize) -> Result<SignedGraph> {
        if v >= self.vertex_count() {
            return Err(Error::UnknownVertex(format!("vertex index {v}")));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b, s)| if a == v || b == v { (a, b, s.flip()) } else { (a, b, s) })
            .collect();
        Ok(SignedGraph { vertex_names: self.vertex_names.clone(), sink: self.sink, edges })
    }

    /// BFS spanning tree from the sink, neighbor ties broken by index.
    /// Returns parent links (parent of root = root).
    fn bfs_tree(&self) -> Result<Vec<usize>> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.vertex_count();
        let mut parent = vec![usize::MAX; n];
        parent[self.sink] = self.sink;
        let mut queue = VecDeque::from([self.sink]);
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        Ok(parent)
    }

    fn edge_sign(&self, u: usize, v: usize) -> Sign {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        self.edges
            .iter()
            .find(|&&(x, y, _)| (x, y) == (a, b))
            .map(|&(_, _, s)| s)
            .expect("edge_sign on a non-edge")
    }

    /// The unique switching-class representative that is positive on the
    /// BFS spanning tree from the sink.
    pub fn canonical_switch_rep(&self) -> Result<SignedGraph> {
        let parent = self.bfs_tree()?;
        // theta[v] = sign product along the tree path sink..v
        let n = self.vertex_count();
        let mut theta = vec![None; n];
        theta[self.sink] = Some(Sign::Positive);
        fn resolve(
            g: &SignedGraph,
            parent: &[usize],
            theta: &mut Vec<Option<Sign>>,
            v: usize,
        ) -> Sign {
            if let Some(s) = theta[v] {
                return s;
            }
            let p = parent[v];
            let s = resolve(g, parent, theta, p).mul(g.edge_sign(p, v));
            theta[v] = Some(s);
            s
        }
        for v in 0..n {
            resolve(self, &parent, &mut theta, v);
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b, s)| {
                (a, b, s.mul(theta[a].unwrap()).mul(theta[b].unwrap()))
            })
            .collect();
        Ok(SignedGraph { vertex_names: self.vertex_names.clone(), sink: self.sink, edges })
    }

    pub fn is_all_positive(&self) -> bool {
        self.edges.iter().all(|&(_, _, s)| s == Sign::Positive)
    }

    /// All edges between nonsink vertices are negative.
    pub fn is_negative_graph(&self) -> bool {
        self.edges
            .iter()
            .filter(|&&(u, v, _)| u != self.sink && v != self.sink)
            .all(|&(_, _, s)| s == Sign::Negative)
    }

    pub fn is_balanced(&self) -> Result<bool> {
        Ok(self.canonical_switch_rep()?.is_all_positive())
    }

    pub fn switching_equivalent(&self, other: &SignedGraph) -> Result<bool> {
        let same_underlying = self.vertex_names == other.vertex_names
            && self.sink == other.sink
            && self.edges.len() == other.edges.len()
            && self
                .edges
                .iter()
                .zip(&other.edges)
                .all(|(&(a, b, _), &(c, d, _))| (a, b) == (c, d));
        if !same_underlying {
            return Err(Error::Precondition(
                "switching equivalence requires the same underlying graph".into(),
            ));
        }
        Ok(self.canonical_switch_rep()? == other.canonical_switch_rep()?)
    }

    /// Spanning tree count of the underlying graph (matrix-tree).
    pub fn spanning_tree_count(&self) -> Result<BigInt> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let (_, m) = self.reduced_laplacians()?;
        m.det()
    }

    /// Weighted count of spanning TU-subgraphs: subgraphs whose
    /// components are trees or unicyclic with an odd cycle, with exactly
    /// one tree component and that component containing the sink. Each
    /// subgraph contributes `4^c` where `c` is its number of unicyclic
    /// components. For negative graphs this total equals `det L`.
    pub fn tu_subgraph_sum(&self) -> Result<TUCount> {
        if !self.is_negative_graph() {
            return Err(Error::Precondition(
                "TU-subgraph count applies to negative graphs".into(),
            ));
        }
        let e = self.edges.len();
        if e > TU_EDGE_GUARD {
            return Err(Error::ResourceGuard(format!(
                "{e} edges exceeds TU enumeration guard of {TU_EDGE_GUARD}"
            )));
        }
        let n_total = self.vertex_count();
        let pick = n_total - 1; // one tree component, rest unicyclic
        let mut by_cycle_count: BTreeMap<usize, BigInt> = BTreeMap::new();
        let mut chosen = Vec::with_capacity(pick);
        self.tu_recurse(0, pick, &mut chosen, &mut by_cycle_count);
        let total = by_cycle_count
            .iter()
            .map(|(&c, count)| count * BigInt::from(4u32).pow(c as u32))
            .sum();
        Ok(TUCount { total, by_cycle_count })
    }

    fn tu_recurse(
        &self,
        start: usize,
        remaining: usize,
        chosen: &mut Vec<usize>,
        acc: &mut BTreeMap<usize, BigInt>,
    ) {
        if remaining == 0 {
            if let Some(c) = self.classify_tu(chosen) {
                *acc.entry(c).or_default() += 1;
            }
            return;
        }
        if self.edges.len() - start < remaining {
            return;
        }
        for i in start..self.edges.len() {
            chosen.push(i);
            self.tu_recurse(i + 1, remaining - 1, chosen, acc);
            chosen.pop();
        }
    }

    /// Classifies an edge subset as a spanning TU-subgraph, returning the
    /// number of unicyclic components, or `None` if it does not qualify.
    fn classify_tu(&self, edge_idx: &[usize]) -> Option<usize> {
        let n = self.vertex_count();
        let mut comp = (0..n).collect::<Vec<usize>>();
        fn find(comp: &mut Vec<usize>, v: usize) -> usize {
            if comp[v] != v {
                let r = find(comp, comp[v]);
                comp[v] = r;
            }
            comp[v]
        }
        for &ei in edge_idx {
            let (u, v, _) = self.edges[ei];
            let (ru, rv) = (find(&mut comp, u), find(&mut comp, v));
            if ru != rv {
                comp[ru] = rv;
            }
        }
        let mut vcount = vec![0usize; n];
        let mut ecount = vec![0usize; n];
        for v in 0..n {
            let r = find(&mut comp, v);
            vcount[r] += 1;
        }
        for &ei in edge_idx {
            let (u, _, _) = self.edges[ei];
            let r = find(&mut comp, u);
            ecount[r] += 1;
        }
        let sink_root = find(&mut comp, self.sink);
        let mut unicyclic = 0;
        for r in 0..n {
            if vcount[r] == 0 {
                continue;
            }
            if ecount[r] == vcount[r].wrapping_sub(1) {
                // tree component; only the sink's is allowed
                if r != sink_root {
                    return None;
                }
            } else if ecount[r] == vcount[r] {
                if r == sink_root {
                    return None;
                }
                if !self.component_cycle_is_odd(edge_idx, &mut comp, r) {
                    return None;
                }
                unicyclic += 1;
            } else {
                return None;
            }
        }
        Some(unicyclic)
    }

    /// For a unicyclic component rooted at `root`, prunes leaves to find
    /// the unique cycle and checks that its length is odd.
    fn component_cycle_is_odd(
        &self,
        edge_idx: &[usize],
        comp: &mut Vec<usize>,
        root: usize,
    ) -> bool {
        fn find(comp: &mut Vec<usize>, v: usize) -> usize {
            if comp[v] != v {
                let r = find(comp, comp[v]);
                comp[v] = r;
            }
            comp[v]
        }
        let n = self.vertex_count();
        let mut deg = vec![0usize; n];
        let mut alive_edges: Vec<(usize, usize)> = Vec::new();
        for &ei in edge_idx {
            let (u, v, _) = self.edges[ei];
            if find(comp, u) == root {
                deg[u] += 1;
                deg[v] += 1;
                alive_edges.push((u, v));
            }
        }
        let mut removed = vec![false; alive_edges.len()];
        loop {
            let mut pruned = false;
            for (i, &(u, v)) in alive_edges.iter().enumerate() {
                if removed[i] {
                    continue;
                }
                if deg[u] == 1 || deg[v] == 1 {
                    removed[i] = true;
                    deg[u] -= 1;
                    deg[v] -= 1;
                    pruned = true;
                }
            }
            if !pruned {
                break;
            }
        }
        let cycle_len = removed.iter().filter(|&&r| !r).count();
        cycle_len % 2 == 1
    }
}
