//! Steiner trees as edge-index sets, and the minimality checker.

use serde::Serialize;

use crate::graph::{Cost, Graph};

/// A set of edge indices of some graph together with its total cost.
/// Edge indices are kept sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SteinerTree {
    cost: Cost,
    edges: Vec<usize>,
}

impl SteinerTree {
    pub fn new(mut edges: Vec<usize>, cost: Cost) -> Self {
        edges.sort_unstable();
        edges.dedup();
        SteinerTree { cost, edges }
    }

    /// Builds a tree and computes its cost from `g`.
    pub fn from_graph(g: &Graph, edges: Vec<usize>) -> Self {
        let mut t = Self::new(edges, 0);
        t.cost = g.total_cost(&t.edges);
        t
    }

    pub(crate) fn from_parts(edges: Vec<usize>, cost: Cost) -> Self {
        Self::new(edges, cost)
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Maps edge indices through `f` (e.g. from a subgraph to its parent).
    pub fn map_edges(&self, f: impl Fn(usize) -> usize) -> Self {
        Self::new(self.edges.iter().map(|&e| f(e)).collect(), self.cost)
    }

    /// JSON line record with endpoints taken from `g`.
    pub fn to_record(&self, g: &Graph) -> TreeRecord {
        TreeRecord {
            cost: self.cost,
            edges: self
                .edges
                .iter()
                .map(|&e| {
                    let e = g.edge(e);
                    [e.u, e.v]
                })
                .collect(),
        }
    }
}

/// Output record: `{"cost": c, "edges": [[u, v], ...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct TreeRecord {
    pub cost: Cost,
    pub edges: Vec<[u32; 2]>,
}

/// Sorts trees by (cost, edge set) and removes duplicates.
pub fn canonical_sort(trees: &mut Vec<SteinerTree>) {
    trees.sort();
    trees.dedup();
}

pub(crate) struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb) as usize] = ra.min(rb);
        true
    }
}

/// True iff `edges` is acyclic, joins all terminals in one component that
/// also holds every edge, and every leaf is a terminal.
pub fn is_minimal_steiner_tree(g: &Graph, edges: &[usize]) -> bool {
    let terminals = g.terminals();
    if terminals.is_empty() {
        return edges.is_empty();
    }
    let mut uf = UnionFind::new(g.vertex_count() + 1);
    let mut degree = vec![0u32; g.vertex_count() + 1];
    for &e in edges {
        let Some(edge) = g.edges().get(e) else {
            return false;
        };
        if !uf.union(edge.u, edge.v) {
            return false;
        }
        degree[edge.u as usize] += 1;
        degree[edge.v as usize] += 1;
    }
    let root = uf.find(terminals[0]);
    if terminals.iter().any(|&t| uf.find(t) != root) {
        return false;
    }
    if edges.iter().any(|&e| uf.find(g.edge(e).u) != root) {
        return false;
    }
    g.vertices()
        .all(|v| degree[v as usize] != 1 || g.is_terminal(v))
}

pub fn validate_tree(t: &SteinerTree, g: &Graph) -> bool {
    is_minimal_steiner_tree(g, t.edges()) && t.cost() == g.total_cost(t.edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Edge;

    #[test]
    fn triangle_cases() {
        let g = triangle();
        assert!(validate_tree(&SteinerTree::from_graph(&g, vec![0, 1]), &g));
        assert!(validate_tree(&SteinerTree::from_graph(&g, vec![2]), &g));
        assert!(!validate_tree(
            &SteinerTree::from_graph(&g, vec![0, 1, 2]),
            &g
        ));
        assert!(!validate_tree(&SteinerTree::from_graph(&g, vec![0]), &g));
        assert!(!validate_tree(&SteinerTree::from_graph(&g, vec![]), &g));
    }

    #[test]
    fn wrong_cost_fails() {
        let g = triangle();
        assert!(!validate_tree(&SteinerTree::new(vec![2], 2), &g));
    }

    #[test]
    fn non_terminal_leaf_fails() {
        // Path 1-2-3 plus pendant 2-4; terminals {1,3}.
        let g = Graph::new(
            4,
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1), Edge::new(2, 4, 1)],
            [1, 3],
        )
        .unwrap();
        assert!(is_minimal_steiner_tree(&g, &[0, 1]));
        assert!(!is_minimal_steiner_tree(&g, &[0, 1, 2]));
    }

    #[test]
    fn stray_component_fails() {
        let g = Graph::new(
            5,
            vec![
                Edge::new(1, 2, 1),
                Edge::new(2, 3, 1),
                Edge::new(3, 4, 1),
                Edge::new(4, 5, 1),
            ],
            [1, 2],
        )
        .unwrap();
        assert!(!is_minimal_steiner_tree(&g, &[0, 3]));
    }

    #[test]
    fn loop_is_a_cycle() {
        let g = Graph::new(2, vec![Edge::new(1, 2, 1), Edge::new(2, 2, 1)], [1, 2]).unwrap();
        assert!(!is_minimal_steiner_tree(&g, &[0, 1]));
    }
}
