//! Edge orderings and the frontier sets they induce.
//!
//! Steps are 1-based: step `i` processes edge `permutation[i - 1]`. The
//! frontier after step `i` holds the vertices touched by an edge of step
//! `<= i` and by an edge of step `> i`.

use std::collections::VecDeque;

use crate::graph::{Graph, Vertex};

/// Which vertex the breadth-first edge ordering starts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartRule {
    /// Terminal of minimum degree, smallest id on ties.
    #[default]
    MinDegreeTerminal,
    Vertex(Vertex),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeOrder {
    permutation: Vec<usize>,
    /// `frontiers[i]` is F_i, sorted ascending; `frontiers[0]` is F_0.
    frontiers: Vec<Vec<Vertex>>,
    /// Step at which each vertex is first / last touched (0 if never).
    first_step: Vec<usize>,
    last_step: Vec<usize>,
}

impl EdgeOrder {
    /// Wraps an explicit permutation of the edge indices of `g`.
    ///
    /// Panics if `permutation` is not a permutation of `0..g.edge_count()`.
    pub fn from_permutation(g: &Graph, permutation: Vec<usize>) -> Self {
        let m = g.edge_count();
        assert_eq!(permutation.len(), m, "permutation length mismatch");
        let mut seen = vec![false; m];
        for &e in &permutation {
            assert!(e < m && !seen[e], "not a permutation of the edge indices");
            seen[e] = true;
        }

        let n = g.vertex_count();
        let mut first_step = vec![0usize; n + 1];
        let mut last_step = vec![0usize; n + 1];
        for (pos, &e) in permutation.iter().enumerate() {
            let step = pos + 1;
            let edge = g.edge(e);
            for x in [edge.u, edge.v] {
                if first_step[x as usize] == 0 {
                    first_step[x as usize] = step;
                }
                last_step[x as usize] = step;
            }
        }

        // Sweep: a vertex is on the frontier for steps first..last-1.
        let mut enter: Vec<Vec<Vertex>> = vec![Vec::new(); m + 1];
        let mut leave: Vec<Vec<Vertex>> = vec![Vec::new(); m + 1];
        for v in g.vertices() {
            let (f, l) = (first_step[v as usize], last_step[v as usize]);
            if f != 0 && f < l {
                enter[f].push(v);
                leave[l].push(v);
            }
        }
        let mut frontiers = Vec::with_capacity(m + 1);
        let mut current: Vec<Vertex> = Vec::new();
        frontiers.push(current.clone());
        for step in 1..=m {
            current.retain(|v| !leave[step].contains(v));
            current.extend_from_slice(&enter[step]);
            current.sort_unstable();
            frontiers.push(current.clone());
        }

        EdgeOrder {
            permutation,
            frontiers,
            first_step,
            last_step,
        }
    }

    /// Breadth-first edge order. Vertices are visited from the start vertex,
    /// neighbors in ascending id order; each dequeued vertex emits its not yet
    /// emitted incident edges ordered by (opposite endpoint, edge index).
    /// Components not reachable from the start are appended the same way,
    /// starting from their smallest vertex.
    pub fn bfs(g: &Graph, rule: StartRule) -> Self {
        let start = match rule {
            StartRule::Vertex(v) => Some(v),
            StartRule::MinDegreeTerminal => g.min_degree_terminal(),
        };
        let n = g.vertex_count();
        let mut visited = vec![false; n + 1];
        let mut emitted = vec![false; g.edge_count()];
        let mut permutation = Vec::with_capacity(g.edge_count());

        let starts = start.into_iter().chain(g.vertices());
        for s in starts {
            if visited[s as usize] || g.incident(s).is_empty() {
                continue;
            }
            visited[s as usize] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                let mut incident: Vec<(Vertex, usize)> = g
                    .incident(x)
                    .iter()
                    .map(|&e| (g.edge(e).other(x), e))
                    .collect();
                incident.sort_unstable();
                for (y, e) in incident {
                    if !emitted[e] {
                        emitted[e] = true;
                        permutation.push(e);
                    }
                    if !visited[y as usize] {
                        visited[y as usize] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        Self::from_permutation(g, permutation)
    }

    pub fn len(&self) -> usize {
        self.permutation.len()
    }

    pub fn is_empty(&self) -> bool {
        self.permutation.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    /// Edge index processed at 1-based `step`.
    pub fn edge_at(&self, step: usize) -> usize {
        self.permutation[step - 1]
    }

    /// F_i for `i` in `0..=len()`.
    pub fn frontier(&self, i: usize) -> &[Vertex] {
        &self.frontiers[i]
    }

    pub fn frontier_width(&self) -> usize {
        self.frontiers.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// First step touching `v`, or 0 if `v` has no edges.
    pub fn first_step(&self, v: Vertex) -> usize {
        self.first_step[v as usize]
    }

    /// Last step touching `v`, or 0 if `v` has no edges.
    pub fn last_step(&self, v: Vertex) -> usize {
        self.last_step[v as usize]
    }
}
