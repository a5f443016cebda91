//! Seed trees and the seed-union subgraph.
//!
//! Seeds come from the tree-of-shortest-paths heuristic: shortest paths from
//! one terminal to every other terminal, unioned and trimmed to a minimal
//! tree. Further seeds are computed on copies of the graph with a random
//! fraction of the edges deleted.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Cost, Graph, Restriction, Vertex};
use crate::tree::SteinerTree;

/// Which terminal roots the shortest-path runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeedRoot {
    #[default]
    MinDegree,
    Vertex(Vertex),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedConfig {
    pub num_seeds: usize,
    /// Fraction of edges deleted for each perturbed run, in `[0, 1)`.
    pub perturb_fraction: f64,
    pub rng_seed: u64,
    pub root: SeedRoot,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig {
            num_seeds: 3,
            perturb_fraction: 0.05,
            rng_seed: 0,
            root: SeedRoot::MinDegree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeedError {
    #[error("seed root {0} is not a terminal")]
    RootNotTerminal(Vertex),
    #[error("graph has no terminals")]
    NoTerminals,
    #[error("num_seeds must be at least 1")]
    NoSeeds,
    #[error("perturbation fraction {0} is outside [0, 1)")]
    BadFraction(String),
    #[error("terminal {0} is unreachable from the root")]
    Unreachable(Vertex),
}

/// Perturbed samples tried per requested seed before giving up.
const ATTEMPTS_PER_SEED: usize = 20;

/// Shortest paths from `root` to every terminal, unioned and trimmed of
/// non-terminal leaves.
///
/// Distance ties are broken by the smaller predecessor vertex, then the
/// smaller edge index.
pub fn tosp_tree(g: &Graph, root: Vertex) -> Result<SteinerTree, SeedError> {
    if !g.is_terminal(root) {
        return Err(SeedError::RootNotTerminal(root));
    }
    let n = g.vertex_count();
    let mut dist = vec![Cost::MAX; n + 1];
    let mut pred: Vec<Option<(Vertex, usize)>> = vec![None; n + 1];
    let mut done = vec![false; n + 1];
    let mut heap = BinaryHeap::new();
    dist[root as usize] = 0;
    heap.push(Reverse((0 as Cost, root)));
    while let Some(Reverse((d, x))) = heap.pop() {
        if done[x as usize] {
            continue;
        }
        done[x as usize] = true;
        for &e in g.incident(x) {
            let y = g.edge(e).other(x);
            if done[y as usize] {
                continue;
            }
            let nd = d.saturating_add(g.edge(e).cost);
            let better = match nd.cmp(&dist[y as usize]) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => pred[y as usize].is_some_and(|p| (x, e) < p),
                std::cmp::Ordering::Greater => false,
            };
            if better {
                dist[y as usize] = nd;
                pred[y as usize] = Some((x, e));
                heap.push(Reverse((nd, y)));
            }
        }
    }

    let mut edges = BTreeSet::new();
    for &t in g.terminals() {
        if !done[t as usize] {
            return Err(SeedError::Unreachable(t));
        }
        let mut x = t;
        while let Some((p, e)) = pred[x as usize] {
            if !edges.insert(e) {
                break;
            }
            x = p;
        }
    }
    let edges = prune_leaves(g, edges.into_iter().collect());
    Ok(SteinerTree::from_graph(g, edges))
}

/// Repeatedly deletes edges ending in a non-terminal leaf.
fn prune_leaves(g: &Graph, mut edges: Vec<usize>) -> Vec<usize> {
    loop {
        let mut degree = vec![0u32; g.vertex_count() + 1];
        for &e in &edges {
            degree[g.edge(e).u as usize] += 1;
            degree[g.edge(e).v as usize] += 1;
        }
        let is_dangling = |v: Vertex| degree[v as usize] == 1 && !g.is_terminal(v);
        let before = edges.len();
        edges.retain(|&e| !is_dangling(g.edge(e).u) && !is_dangling(g.edge(e).v));
        if edges.len() == before {
            return edges;
        }
    }
}

pub fn resolve_root(g: &Graph, root: SeedRoot) -> Result<Vertex, SeedError> {
    match root {
        SeedRoot::MinDegree => g.min_degree_terminal().ok_or(SeedError::NoTerminals),
        SeedRoot::Vertex(v) => Ok(v),
    }
}

#[derive(Debug, Clone)]
pub struct SeedSelection {
    /// Union of the seed edges, as a restriction of the input graph.
    pub subgraph: Restriction,
    /// Distinct seed trees, in edge indices of the input graph.
    pub seeds: Vec<SteinerTree>,
    /// How many requested seeds could not be produced.
    pub shortfall: usize,
}

impl SeedSelection {
    pub fn best_cost(&self) -> Option<Cost> {
        self.seeds.iter().map(SteinerTree::cost).min()
    }
}

/// Builds the seed-union subgraph from already known trees.
pub fn union_of(g: &Graph, seeds: Vec<SteinerTree>, shortfall: usize) -> SeedSelection {
    let kept: BTreeSet<usize> = seeds
        .iter()
        .flat_map(|t| t.edges().iter().copied())
        .collect();
    let kept: Vec<usize> = kept.into_iter().collect();
    SeedSelection {
        subgraph: g.restrict(&kept),
        seeds,
        shortfall,
    }
}

pub fn select_seeds(g: &Graph, cfg: &SeedConfig) -> Result<SeedSelection, SeedError> {
    if cfg.num_seeds == 0 {
        return Err(SeedError::NoSeeds);
    }
    if !(0.0..1.0).contains(&cfg.perturb_fraction) {
        return Err(SeedError::BadFraction(cfg.perturb_fraction.to_string()));
    }
    let root = resolve_root(g, cfg.root)?;
    let mut seeds = vec![tosp_tree(g, root)?];

    let m = g.edge_count();
    let delete = ((cfg.perturb_fraction * m as f64).ceil() as usize).min(m);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut attempts = 0;
    let budget = ATTEMPTS_PER_SEED * (cfg.num_seeds - 1);
    while seeds.len() < cfg.num_seeds && attempts < budget && delete > 0 {
        attempts += 1;
        let mut removed = vec![false; m];
        for e in sample(&mut rng, m, delete) {
            removed[e] = true;
        }
        let kept: Vec<usize> = (0..m).filter(|&e| !removed[e]).collect();
        let working = g.restrict(&kept);
        if !terminals_connected(&working.graph) {
            continue;
        }
        let tree = tosp_tree(&working.graph, root)?;
        let tree = SteinerTree::new(working.to_parent(tree.edges()), tree.cost());
        if !seeds.contains(&tree) {
            seeds.push(tree);
        }
    }
    let shortfall = cfg.num_seeds - seeds.len();
    Ok(union_of(g, seeds, shortfall))
}

fn terminals_connected(g: &Graph) -> bool {
    let Some(&t0) = g.terminals().first() else {
        return true;
    };
    let reach = g.reachable_from(t0, |_| true);
    let mut seen = vec![false; g.vertex_count() + 1];
    for v in reach {
        seen[v as usize] = true;
    }
    g.terminals().iter().all(|&t| seen[t as usize])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::Edge;
    use crate::tree::validate_tree;

    #[test]
    fn triangle_tosp() {
        let g = triangle();
        let t = tosp_tree(&g, 1).unwrap();
        assert_eq!(t.edges(), &[0, 1]);
        assert_eq!(t.cost(), 2);
        assert_eq!(tosp_tree(&g, 2), Err(SeedError::RootNotTerminal(2)));
    }

    #[test]
    fn star_tosp() {
        // Center 3 is a non-terminal; terminals 1 and 2.
        let g = Graph::new(3, vec![Edge::new(1, 3, 1), Edge::new(3, 2, 1)], [1, 2]).unwrap();
        let t = tosp_tree(&g, 1).unwrap();
        assert_eq!(t.edges(), &[0, 1]);
        assert_eq!(t.cost(), 2);
    }

    #[test]
    fn prunes_non_terminal_leaves() {
        let g = Graph::new(
            4,
            vec![Edge::new(1, 2, 1), Edge::new(2, 3, 1), Edge::new(2, 4, 1)],
            [1, 3],
        )
        .unwrap();
        assert_eq!(prune_leaves(&g, vec![0, 1, 2]), vec![0, 1]);
        assert_eq!(prune_leaves(&g, vec![0, 2]), Vec::<usize>::new());
    }

    #[test]
    fn zero_weight_ties_stay_acyclic() {
        let g = Graph::new(
            4,
            vec![
                Edge::new(1, 2, 0),
                Edge::new(2, 3, 0),
                Edge::new(3, 1, 0),
                Edge::new(3, 4, 0),
            ],
            [1, 4],
        )
        .unwrap();
        let t = tosp_tree(&g, 1).unwrap();
        assert!(validate_tree(&t, &g));
    }

    #[test]
    fn single_seed_is_tosp() {
        let g = triangle();
        let cfg = SeedConfig {
            num_seeds: 1,
            ..Default::default()
        };
        let sel = select_seeds(&g, &cfg).unwrap();
        assert_eq!(sel.subgraph.parent_edges, vec![0, 1]);
        assert_eq!(sel.seeds.len(), 1);
        assert_eq!(sel.best_cost(), Some(2));
    }

    #[test]
    fn triangle_two_seeds_cover_everything() {
        let g = triangle();
        let cfg = SeedConfig {
            num_seeds: 2,
            ..Default::default()
        };
        let sel = select_seeds(&g, &cfg).unwrap();
        assert_eq!(sel.seeds.len(), 2);
        assert_eq!(sel.seeds[1].edges(), &[2]);
        assert_eq!(sel.subgraph.parent_edges, vec![0, 1, 2]);
        assert_eq!(sel.shortfall, 0);
    }

    #[test]
    fn reports_shortfall() {
        // Only two minimal trees exist.
        let g = triangle();
        let cfg = SeedConfig {
            num_seeds: 4,
            ..Default::default()
        };
        let sel = select_seeds(&g, &cfg).unwrap();
        assert_eq!(sel.seeds.len(), 2);
        assert_eq!(sel.shortfall, 2);
    }

    #[test]
    fn reproducible() {
        let g = triangle();
        let cfg = SeedConfig {
            num_seeds: 3,
            rng_seed: 7,
            ..Default::default()
        };
        let a = select_seeds(&g, &cfg).unwrap();
        let b = select_seeds(&g, &cfg).unwrap();
        assert_eq!(a.seeds, b.seeds);
        assert_eq!(a.subgraph, b.subgraph);
    }

    #[test]
    fn bad_config() {
        let g = triangle();
        let cfg = SeedConfig {
            perturb_fraction: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            select_seeds(&g, &cfg),
            Err(SeedError::BadFraction(_))
        ));
        let cfg = SeedConfig {
            num_seeds: 0,
            ..Default::default()
        };
        assert_eq!(select_seeds(&g, &cfg).unwrap_err(), SeedError::NoSeeds);
    }
}
