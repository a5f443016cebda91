//! Problem instance: an undirected, edge-weighted multigraph with a terminal set.
//!
//! Vertices are 1-based ids in `1..=vertex_count`. Edge indices are positions in
//! [`Graph::edges`] and are the canonical identity of an edge everywhere in the
//! crate: trees, BDD variables and output all refer to edges by index.
//!
//! Graphs derived by preprocessing (simplification, seed unions) keep the
//! original vertex numbering, so a vertex can end up with no incident edges.
//! Such vertices are treated as removed.

use std::collections::VecDeque;

use thiserror::Error;

pub type Vertex = u32;
pub type Cost = u64;

/// Cost bound meaning "no bound".
pub const UNBOUNDED: Cost = Cost::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub cost: Cost,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex, cost: Cost) -> Self {
        Edge { u, v, cost }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }

    /// The endpoint opposite to `w`. For a loop this is `w` itself.
    pub fn other(&self, w: Vertex) -> Vertex {
        if self.u == w {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    NoVertices,
    #[error("vertex id {vertex} out of range 1..={vertex_count}")]
    VertexOutOfRange { vertex: Vertex, vertex_count: usize },
    #[error("terminal {0} listed twice")]
    DuplicateTerminal(Vertex),
    #[error("graph is disconnected")]
    Disconnected,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<Vertex>,
    is_terminal: Vec<bool>,
    adjacency: Vec<Vec<usize>>,
    weight_scale: u32,
}

impl Graph {
    /// Builds a graph and checks ranges and connectivity.
    ///
    /// Connectivity is required among the vertices that matter: every vertex
    /// with an incident edge and every terminal must lie in one component.
    /// Vertices without edges that are not terminals are ignored.
    pub fn new(
        vertex_count: usize,
        edges: Vec<Edge>,
        terminals: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self, GraphError> {
        let g = Self::new_unchecked(vertex_count, edges, terminals)?;
        if !g.is_connected() {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    /// Like [`Graph::new`] but skips the connectivity check. Used for
    /// perturbed working copies which may legitimately fall apart.
    pub fn new_unchecked(
        vertex_count: usize,
        edges: Vec<Edge>,
        terminals: impl IntoIterator<Item = Vertex>,
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::NoVertices);
        }
        let in_range = |x: Vertex| x >= 1 && (x as usize) <= vertex_count;
        let mut adjacency = vec![Vec::new(); vertex_count + 1];
        for (idx, e) in edges.iter().enumerate() {
            for x in [e.u, e.v] {
                if !in_range(x) {
                    return Err(GraphError::VertexOutOfRange {
                        vertex: x,
                        vertex_count,
                    });
                }
            }
            adjacency[e.u as usize].push(idx);
            if !e.is_loop() {
                adjacency[e.v as usize].push(idx);
            }
        }
        let mut is_terminal = vec![false; vertex_count + 1];
        let mut terms = Vec::new();
        for t in terminals {
            if !in_range(t) {
                return Err(GraphError::VertexOutOfRange {
                    vertex: t,
                    vertex_count,
                });
            }
            if is_terminal[t as usize] {
                return Err(GraphError::DuplicateTerminal(t));
            }
            is_terminal[t as usize] = true;
            terms.push(t);
        }
        terms.sort_unstable();
        Ok(Graph {
            vertex_count,
            edges,
            terminals: terms,
            is_terminal,
            adjacency,
            weight_scale: 0,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    /// Terminals in ascending id order.
    pub fn terminals(&self) -> &[Vertex] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: Vertex) -> bool {
        self.is_terminal[v as usize]
    }

    /// Indices of edges incident to `v`, in ascending order. A loop appears once.
    pub fn incident(&self, v: Vertex) -> &[usize] {
        &self.adjacency[v as usize]
    }

    /// Number of edge endpoints at `v`; a loop counts twice.
    pub fn degree(&self, v: Vertex) -> usize {
        self.adjacency[v as usize]
            .iter()
            .map(|&e| if self.edges[e].is_loop() { 2 } else { 1 })
            .sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> {
        1..=self.vertex_count as Vertex
    }

    /// Vertices that still carry an edge or are terminals.
    pub fn active_vertex_count(&self) -> usize {
        self.vertices()
            .filter(|&v| !self.adjacency[v as usize].is_empty() || self.is_terminal(v))
            .count()
    }

    /// Decimal places removed from the input weights: stored cost = input × 10^scale.
    pub fn weight_scale(&self) -> u32 {
        self.weight_scale
    }

    pub(crate) fn set_weight_scale(&mut self, scale: u32) {
        self.weight_scale = scale;
    }

    pub fn total_cost(&self, edge_indices: &[usize]) -> Cost {
        edge_indices.iter().map(|&e| self.edges[e].cost).sum()
    }

    /// Terminal of minimum degree, ties broken by smallest id.
    pub fn min_degree_terminal(&self) -> Option<Vertex> {
        self.terminals
            .iter()
            .copied()
            .min_by_key(|&t| (self.degree(t), t))
    }

    pub fn is_connected(&self) -> bool {
        let mut start = None;
        let mut wanted = 0usize;
        for v in self.vertices() {
            if !self.adjacency[v as usize].is_empty() || self.is_terminal(v) {
                wanted += 1;
                start.get_or_insert(v);
            }
        }
        match start {
            None => true,
            Some(s) => self.reachable_from(s, |_| true).len() == wanted,
        }
    }

    /// Vertices reachable from `start` using only edges accepted by `keep`.
    pub fn reachable_from(&self, start: Vertex, keep: impl Fn(usize) -> bool) -> Vec<Vertex> {
        let mut seen = vec![false; self.vertex_count + 1];
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        seen[start as usize] = true;
        while let Some(x) = queue.pop_front() {
            for &e in &self.adjacency[x as usize] {
                if !keep(e) {
                    continue;
                }
                let y = self.edges[e].other(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    out.push(y);
                    queue.push_back(y);
                }
            }
        }
        out
    }

    /// The graph restricted to a subset of edges. Edge `i` of the result is
    /// edge `kept[i]` of `self`; vertex ids and terminals are unchanged.
    pub fn restrict(&self, kept: &[usize]) -> Restriction {
        let edges = kept.iter().map(|&e| self.edges[e]).collect();
        let mut graph = Graph::new_unchecked(self.vertex_count, edges, self.terminals.clone())
            .expect("restriction of a valid graph is valid");
        graph.weight_scale = self.weight_scale;
        Restriction {
            graph,
            parent_edges: kept.to_vec(),
        }
    }
}

/// A graph over a subset of another graph's edges, with the index mapping back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub graph: Graph,
    pub parent_edges: Vec<usize>,
}

impl Restriction {
    pub fn to_parent(&self, edges: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = edges.iter().map(|&e| self.parent_edges[e]).collect();
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// e1=(1,2):1, e2=(2,3):1, e3=(1,3):3; terminals {1,3}.
    pub fn triangle() -> Graph {
        Graph::new(
            3,
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1), Edge::new(1, 3, 3)],
            [1, 3],
        )
        .unwrap()
    }

    pub fn path3(w1: Cost, w2: Cost) -> Graph {
        Graph::new(3, vec![Edge::new(1, 2, w1), Edge::new(2, 3, w2)], [1, 3]).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn adjacency_and_degrees() {
        let g = triangle();
        assert_eq!(g.incident(1), &[0, 2]);
        assert_eq!(g.incident(2), &[0, 1]);
        assert_eq!(g.degree(3), 2);
        assert_eq!(g.min_degree_terminal(), Some(1));
    }

    #[test]
    fn loop_counts_twice() {
        let g = Graph::new(2, vec![Edge::new(1, 2, 1), Edge::new(2, 2, 4)], [1, 2]).unwrap();
        assert_eq!(g.degree(2), 3);
        assert_eq!(g.incident(2), &[0, 1]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            Graph::new(3, vec![Edge::new(1, 4, 1)], [1]),
            Err(GraphError::VertexOutOfRange {
                vertex: 4,
                vertex_count: 3
            })
        );
        assert_eq!(
            Graph::new(4, vec![Edge::new(1, 2, 1), Edge::new(3, 4, 1)], [1, 3]),
            Err(GraphError::Disconnected)
        );
        assert_eq!(
            Graph::new(2, vec![Edge::new(1, 2, 1)], [1, 1]),
            Err(GraphError::DuplicateTerminal(1))
        );
    }

    #[test]
    fn isolated_non_terminal_is_ignored() {
        let g = Graph::new(4, vec![Edge::new(1, 2, 1)], [1, 2]).unwrap();
        assert_eq!(g.active_vertex_count(), 2);
    }

    #[test]
    fn restriction_maps_back() {
        let g = triangle();
        let r = g.restrict(&[2, 0]);
        assert_eq!(r.graph.edge(0), &Edge::new(1, 3, 3));
        assert_eq!(r.to_parent(&[1, 0]), vec![0, 2]);
    }
}
