//! Finite simple graphs (1-dimensional complexes) and their maps to the circle.

mod circle;

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

pub use circle::{
    evaluate, layouts, pigeonhole_lower_bound, search_layout, solve_exact, solve_layouts, ArcAssignment, ArcDirection,
    CircleSolution, CircleWitness, CircularLayout, FiberProfile, LayoutExecutor, LayoutSearch, Sequential, Strategy,
    Target,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("edge #{index} ({u}, {v}) references a vertex outside 0..{vertex_count}")]
    VertexOutOfRange { index: usize, u: usize, v: usize, vertex_count: usize },
    #[error("edge #{index} is a loop at vertex {vertex}")]
    Loop { index: usize, vertex: usize },
    #[error("edge #{index} ({u}, {v}) duplicates an earlier edge")]
    DuplicateEdge { index: usize, u: usize, v: usize },
    #[error("layout is not a permutation of 0..{0}")]
    BadLayout(usize),
    #[error("arc assignment has {got} entries for {expected} edges")]
    BadArcs { expected: usize, got: usize },
}

/// A finite simple graph on vertices `0..vertex_count`.
///
/// Edges are stored as `(u, v)` with `u < v`, in input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SimpleGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn new(vertex_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        for (index, (u, v)) in edges.into_iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::VertexOutOfRange { index, u, v, vertex_count });
            }
            if u == v {
                return Err(GraphError::Loop { index, vertex: u });
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(GraphError::DuplicateEdge { index, u, v });
            }
            out.push(e);
        }
        Ok(SimpleGraph { vertex_count, edges: out })
    }

    /// Builds a simple graph from a multigraph by subdividing loops and
    /// repeated edges. A loop at `u` becomes a triangle through two new
    /// vertices; every repeat of an edge `{u, v}` gets one midpoint. Both
    /// are homeomorphisms, so the map-multiplicity over the circle is unchanged.
    ///
    /// Returns the graph and the number of vertices added.
    pub fn from_multigraph(
        vertex_count: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<(Self, usize), GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut seen = alloc::collections::BTreeSet::new();
        let mut out = Vec::new();
        let mut next = vertex_count;
        for (index, (u, v)) in edges.into_iter().enumerate() {
            if u >= vertex_count || v >= vertex_count {
                return Err(GraphError::VertexOutOfRange { index, u, v, vertex_count });
            }
            if u == v {
                let (a, b) = (next, next + 1);
                next += 2;
                out.extend([(u, a), (a, b), (u, b)]);
                continue;
            }
            let e = (u.min(v), u.max(v));
            if seen.insert(e) {
                out.push(e);
            } else {
                let w = next;
                next += 1;
                out.extend([(e.0, w), (e.1, w)]);
            }
        }
        let graph = SimpleGraph::new(next, out)?;
        Ok((graph, next - vertex_count))
    }

    /// `K_n`, the 1-skeleton of an `(n-1)`-simplex.
    pub fn complete(n: usize) -> Result<Self, GraphError> {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        SimpleGraph::new(n, edges.collect::<Vec<_>>())
    }

    pub fn cycle(n: usize) -> Result<Self, GraphError> {
        SimpleGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn path(n: usize) -> Result<Self, GraphError> {
        SimpleGraph::new(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// The graph with vertices renamed by `perm` (vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if !is_permutation(perm, self.vertex_count) {
            return Err(GraphError::BadLayout(self.vertex_count));
        }
        SimpleGraph::new(self.vertex_count, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
    }

    /// The spanning subgraph keeping the edges whose index satisfies `keep`.
    pub fn edge_subgraph(&self, mut keep: impl FnMut(usize) -> bool) -> Self {
        SimpleGraph {
            vertex_count: self.vertex_count,
            edges: self.edges.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, &e)| e).collect(),
        }
    }

    /// Component label per vertex, numbered in order of first appearance.
    pub fn components(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertex_count).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv)] = ru.min(rv);
            }
        }
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        let mut out = vec![0; self.vertex_count];
        for v in 0..self.vertex_count {
            let r = find(&mut parent, v);
            if label[r] == usize::MAX {
                label[r] = count;
                count += 1;
            }
            out[v] = label[r];
        }
        out
    }
}

pub(crate) fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    perm.iter().all(|&p| p < n && !core::mem::replace(&mut seen[p], true))
}

/// `(β0, β1)`: number of components and cycle rank `|E| - |V| + β0`.
pub fn betti_numbers(g: &SimpleGraph) -> (usize, usize) {
    let b0 = g.components().into_iter().max().map_or(0, |m| m + 1);
    (b0, g.edge_count() + b0 - g.vertex_count())
}

/// Sufficient condition for self-closedness: no vertex of degree exactly one.
pub fn is_self_closed_sufficient(g: &SimpleGraph) -> bool {
    g.degrees().into_iter().all(|d| d != 1)
}

/// No isolated vertex and no component that is a simple path (an arc).
pub fn is_classed_eligible(g: &SimpleGraph) -> bool {
    let deg = g.degrees();
    if deg.contains(&0) {
        return false;
    }
    let comp = g.components();
    let n_comp = comp.iter().max().map_or(0, |m| m + 1);
    let mut vertices = vec![0usize; n_comp];
    let mut edges = vec![0usize; n_comp];
    let mut max_deg = vec![0usize; n_comp];
    for v in 0..g.vertex_count() {
        vertices[comp[v]] += 1;
        max_deg[comp[v]] = max_deg[comp[v]].max(deg[v]);
    }
    for &(u, _) in g.edges() {
        edges[comp[u]] += 1;
    }
    // A connected tree with maximum degree <= 2 and at least one edge is a path.
    !(0..n_comp).any(|c| edges[c] + 1 == vertices[c] && max_deg[c] <= 2)
}
