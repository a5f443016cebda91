//! Brute-force ground truth for small instances.
//!
//! Nothing here shares code with the BDD path: the Steiner-tree test is a
//! plain BFS over the chosen edges, and minimality is checked literally by
//! trying to drop each edge in turn.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::graph::{Cost, Graph, Vertex};
use crate::tree::SteinerTree;

/// Largest edge count the subset sweep accepts.
pub const MAX_ORACLE_EDGES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance has {edges} edges; exhaustive sweep is limited to {limit}")]
    TooLarge { edges: usize, limit: usize },
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    /// Sorted by (cost, edge set).
    pub trees: Vec<SteinerTree>,
    pub elapsed: Duration,
}

/// Acyclic and all terminals in one component.
fn is_steiner(g: &Graph, mask: u32) -> bool {
    let n = g.vertex_count();
    let mut adj: Vec<Vec<Vertex>> = vec![Vec::new(); n + 1];
    let mut edge_count = 0usize;
    let mut touched = vec![false; n + 1];
    for (i, e) in g.edges().iter().enumerate() {
        if mask & (1 << i) != 0 {
            if e.u == e.v {
                return false;
            }
            adj[e.u as usize].push(e.v);
            adj[e.v as usize].push(e.u);
            touched[e.u as usize] = true;
            touched[e.v as usize] = true;
            edge_count += 1;
        }
    }
    // A forest has exactly (vertices - components) edges.
    let mut seen = vec![false; n + 1];
    let mut components = 0usize;
    let mut vertices = 0usize;
    for s in 1..=n {
        if !touched[s] || seen[s] {
            continue;
        }
        components += 1;
        seen[s] = true;
        let mut stack = vec![s as Vertex];
        while let Some(x) = stack.pop() {
            vertices += 1;
            for &y in &adj[x as usize] {
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    stack.push(y);
                }
            }
        }
    }
    if edge_count != vertices - components {
        return false;
    }
    let terms = g.terminals();
    let Some(&t0) = terms.first() else {
        return true;
    };
    if terms.len() == 1 {
        return true;
    }
    // All terminals must be reached from the first one.
    let mut reach = vec![false; n + 1];
    reach[t0 as usize] = true;
    let mut stack = vec![t0];
    while let Some(x) = stack.pop() {
        for &y in &adj[x as usize] {
            if !reach[y as usize] {
                reach[y as usize] = true;
                stack.push(y);
            }
        }
    }
    terms.iter().all(|&t| reach[t as usize])
}

/// All minimal Steiner trees of `g` with cost at most `theta`, by sweeping
/// every edge subset.
pub fn brute_force_minimal_steiner(g: &Graph, theta: Cost) -> Result<OracleResult, OracleError> {
    let m = g.edge_count();
    if m > MAX_ORACLE_EDGES {
        return Err(OracleError::TooLarge {
            edges: m,
            limit: MAX_ORACLE_EDGES,
        });
    }
    let start = Instant::now();
    let mut trees = Vec::new();
    for mask in 0u32..(1u32 << m) {
        let cost: Cost = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .map(|i| g.edge(i).cost)
            .sum();
        if cost > theta || !is_steiner(g, mask) {
            continue;
        }
        let minimal = (0..m)
            .filter(|&i| mask & (1 << i) != 0)
            .all(|i| !is_steiner(g, mask & !(1 << i)));
        if minimal {
            let edges = (0..m).filter(|&i| mask & (1 << i) != 0).collect();
            trees.push(SteinerTree::new(edges, cost));
        }
    }
    trees.sort();
    Ok(OracleResult {
        trees,
        elapsed: start.elapsed(),
    })
}

/// Number of simple s-t paths, counting parallel edges as distinct paths.
pub fn count_simple_paths(g: &Graph, s: Vertex, t: Vertex) -> u64 {
    assert_ne!(s, t, "endpoints must differ");
    fn dfs(g: &Graph, x: Vertex, t: Vertex, on_path: &mut [bool]) -> u64 {
        if x == t {
            return 1;
        }
        on_path[x as usize] = true;
        let mut total = 0;
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if !on_path[y as usize] {
                total += dfs(g, y, t, on_path);
            }
        }
        on_path[x as usize] = false;
        total
    }
    let mut on_path = vec![false; g.vertex_count() + 1];
    dfs(g, s, t, &mut on_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{Edge, UNBOUNDED};

    fn summary(r: &OracleResult) -> Vec<(Cost, Vec<usize>)> {
        r.trees
            .iter()
            .map(|t| (t.cost(), t.edges().to_vec()))
            .collect()
    }

    #[test]
    fn triangle_two_terminals() {
        let r = brute_force_minimal_steiner(&triangle(), UNBOUNDED).unwrap();
        assert_eq!(summary(&r), vec![(2, vec![0, 1]), (3, vec![2])]);
    }

    #[test]
    fn triangle_all_terminals() {
        let g = Graph::new(3, triangle().edges().to_vec(), [1, 2, 3]).unwrap();
        let r = brute_force_minimal_steiner(&g, UNBOUNDED).unwrap();
        assert_eq!(
            summary(&r),
            vec![(2, vec![0, 1]), (4, vec![0, 2]), (4, vec![1, 2])]
        );
    }

    #[test]
    fn zero_theta_is_empty() {
        let r = brute_force_minimal_steiner(&triangle(), 0).unwrap();
        assert!(r.trees.is_empty());
    }

    #[test]
    fn too_large() {
        let edges = (0..25).map(|_| Edge::new(1, 2, 1)).collect();
        let g = Graph::new(2, edges, [1, 2]).unwrap();
        assert!(matches!(
            brute_force_minimal_steiner(&g, UNBOUNDED),
            Err(OracleError::TooLarge { edges: 25, .. })
        ));
    }

    #[test]
    fn simple_path_counts() {
        assert_eq!(count_simple_paths(&triangle(), 1, 3), 2);
        assert_eq!(count_simple_paths(&path3(1, 1), 1, 3), 1);
        let mut k4 = Vec::new();
        for u in 1..=4 {
            for v in u + 1..=4 {
                k4.push(Edge::new(u, v, 1));
            }
        }
        let g = Graph::new(4, k4, [1, 2]).unwrap();
        for (s, t) in [(1, 2), (1, 4), (3, 4)] {
            assert_eq!(count_simple_paths(&g, s, t), 5);
        }
    }

    #[test]
    fn parallel_edges_are_distinct_paths() {
        let g = Graph::new(2, vec![Edge::new(1, 2, 1), Edge::new(2, 1, 2)], [1, 2]).unwrap();
        assert_eq!(count_simple_paths(&g, 1, 2), 2);
        assert_eq!(
            brute_force_minimal_steiner(&g, UNBOUNDED)
                .unwrap()
                .trees
                .len(),
            2
        );
    }
}
