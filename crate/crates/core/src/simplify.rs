//! Lossless graph simplification: series contraction of degree-2 non-terminals
//! and loop deletion, repeated to a fixpoint.
//!
//! A minimal Steiner tree uses either both or neither of the two edges at a
//! degree-2 non-terminal (using one would leave a non-terminal leaf), so the
//! contraction is a bijection on minimal Steiner trees. Parallel edges that
//! arise are kept: each one stands for a different original path.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::graph::{Cost, Edge, Graph, Vertex};
use crate::tree::SteinerTree;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplificationMap {
    /// For each simplified edge, the original edges along its path from its
    /// `u` endpoint to its `v` endpoint.
    pub replacements: Vec<Vec<usize>>,
    /// Original edges deleted because they became (or were) loops.
    pub removed_loops: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("edge index {index} is not an edge of the simplified graph ({edge_count} edges)")]
    UnknownEdge { index: usize, edge_count: usize },
    #[error("original edge {0} was removed by simplification")]
    RemovedEdge(usize),
}

impl SimplificationMap {
    pub fn identity(edge_count: usize) -> Self {
        SimplificationMap {
            replacements: (0..edge_count).map(|e| vec![e]).collect(),
            removed_loops: Vec::new(),
        }
    }

    /// True if no edge was contracted or removed.
    pub fn is_identity(&self) -> bool {
        self.removed_loops.is_empty()
            && self
                .replacements
                .iter()
                .enumerate()
                .all(|(i, r)| r.as_slice() == [i])
    }

    /// Replaces every simplified edge of `tree` by its original path.
    pub fn expand_tree(&self, tree: &SteinerTree) -> Result<SteinerTree, ExpandError> {
        let mut edges = Vec::new();
        for &e in tree.edges() {
            let path = self.replacements.get(e).ok_or(ExpandError::UnknownEdge {
                index: e,
                edge_count: self.replacements.len(),
            })?;
            edges.extend_from_slice(path);
        }
        Ok(SteinerTree::from_parts(edges, tree.cost()))
    }

    /// Maps a set of original edges onto the simplified edges that contain
    /// them. Used to bring externally supplied trees into simplified indexing.
    pub fn contract_edges(&self, original: &[usize]) -> Result<Vec<usize>, ExpandError> {
        let mut owner = std::collections::HashMap::new();
        for (s, path) in self.replacements.iter().enumerate() {
            for &o in path {
                owner.insert(o, s);
            }
        }
        let mut out = BTreeSet::new();
        for &o in original {
            match owner.get(&o) {
                Some(&s) => {
                    out.insert(s);
                }
                None => return Err(ExpandError::RemovedEdge(o)),
            }
        }
        Ok(out.into_iter().collect())
    }
}

struct WorkEdge {
    u: Vertex,
    v: Vertex,
    cost: Cost,
    path: Vec<usize>,
}

impl WorkEdge {
    /// Path oriented to start at `from`.
    fn path_from(&self, from: Vertex) -> Vec<usize> {
        if self.u == from {
            self.path.clone()
        } else {
            self.path.iter().rev().copied().collect()
        }
    }
}

pub fn simplify(g: &Graph) -> (Graph, SimplificationMap) {
    let n = g.vertex_count();
    let mut edges: Vec<Option<WorkEdge>> = g
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            Some(WorkEdge {
                u: e.u,
                v: e.v,
                cost: e.cost,
                path: vec![i],
            })
        })
        .collect();
    let mut incident: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n + 1];
    for (i, e) in g.edges().iter().enumerate() {
        incident[e.u as usize].insert(i);
        incident[e.v as usize].insert(i);
    }
    let mut removed_loops = Vec::new();

    let remove =
        |edges: &mut Vec<Option<WorkEdge>>, incident: &mut Vec<BTreeSet<usize>>, i: usize| {
            let e = edges[i].take().expect("edge removed twice");
            incident[e.u as usize].remove(&i);
            incident[e.v as usize].remove(&i);
            e
        };

    loop {
        let mut changed = false;

        let loops: Vec<usize> = edges
            .iter()
            .enumerate()
            .filter_map(|(i, e)| e.as_ref().filter(|e| e.u == e.v).map(|_| i))
            .collect();
        for i in loops {
            let e = remove(&mut edges, &mut incident, i);
            removed_loops.extend(e.path);
            changed = true;
        }

        for v in 1..=n as Vertex {
            if g.is_terminal(v) || incident[v as usize].len() != 2 {
                continue;
            }
            // A fresh loop at v is deleted in the next round first.
            let has_loop = incident[v as usize]
                .iter()
                .any(|&i| edges[i].as_ref().is_some_and(|e| e.u == e.v));
            if has_loop {
                continue;
            }
            let mut it = incident[v as usize].iter().copied();
            let (i, j) = (it.next().unwrap(), it.next().unwrap());
            let ei = remove(&mut edges, &mut incident, i);
            let ej = remove(&mut edges, &mut incident, j);
            let a = if ei.u == v { ei.v } else { ei.u };
            let b = if ej.u == v { ej.v } else { ej.u };
            let mut path = ei.path_from(a);
            path.extend(ej.path_from(v));
            let idx = edges.len();
            edges.push(Some(WorkEdge {
                u: a,
                v: b,
                cost: ei.cost + ej.cost,
                path,
            }));
            incident[a as usize].insert(idx);
            incident[b as usize].insert(idx);
            changed = true;
        }

        if !changed {
            break;
        }
    }

    // Surviving edges are listed in order of their smallest original edge,
    // which keeps untouched edges in input order.
    let mut survivors: Vec<WorkEdge> = edges.into_iter().flatten().collect();
    survivors.sort_by_key(|e| *e.path.iter().min().expect("paths are non-empty"));
    removed_loops.sort_unstable();

    let simplified_edges = survivors
        .iter()
        .map(|e| Edge::new(e.u, e.v, e.cost))
        .collect();
    let mut graph = Graph::new(n, simplified_edges, g.terminals().to_vec())
        .expect("simplification preserves validity");
    graph.set_weight_scale(g.weight_scale());
    let map = SimplificationMap {
        replacements: survivors.into_iter().map(|e| e.path).collect(),
        removed_loops,
    };
    (graph, map)
}
