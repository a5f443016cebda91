#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steiner_bdd::{Edge, Graph};

#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub terminals: &'static [usize],
    pub max_weight: u64,
}

/// Sizes of the oracle-comparison suite.
pub const SMALL: Params = Params {
    max_vertices: 8,
    max_edges: 14,
    terminals: &[2, 3, 4],
    max_weight: 10,
};

/// Random connected multigraph: a random spanning tree plus extra edges,
/// which may be parallel. No loops.
pub fn random_instance(seed: u64, p: Params) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_t = *p.terminals.iter().max().unwrap();
    let n = rng.gen_range(max_t.max(2)..=p.max_vertices);
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    perm.shuffle(&mut rng);

    let mut edges = Vec::new();
    let w = |rng: &mut ChaCha8Rng| rng.gen_range(1..=p.max_weight);
    for i in 1..n {
        let parent = perm[rng.gen_range(0..i)];
        edges.push(Edge::new(parent, perm[i], w(&mut rng)));
    }
    let target = rng.gen_range(n - 1..=p.max_edges.max(n - 1));
    while edges.len() < target {
        let u = rng.gen_range(1..=n as u32);
        let v = rng.gen_range(1..=n as u32);
        if u != v {
            edges.push(Edge::new(u, v, w(&mut rng)));
        }
    }
    edges.shuffle(&mut rng);

    let t = *p.terminals.choose(&mut rng).unwrap();
    let terminals: Vec<u32> = perm[..t].to_vec();
    Graph::new(n, edges, terminals).unwrap()
}

/// Like [`random_instance`] but with at least one degree-2 non-terminal.
pub fn instance_with_series_vertex(seed: u64, p: Params) -> Graph {
    let g = random_instance(seed, p);
    let has = g.vertices().any(|v| g.degree(v) == 2 && !g.is_terminal(v));
    if has {
        return g;
    }
    // Subdivide the first edge with a new non-terminal vertex.
    let n = g.vertex_count() + 1;
    let mut edges = g.edges().to_vec();
    let e = edges[0];
    edges[0] = Edge::new(e.u, n as u32, e.cost);
    edges.push(Edge::new(n as u32, e.v, 1 + seed % 5));
    Graph::new(n, edges, g.terminals().to_vec()).unwrap()
}

/// `rows × cols` grid, unit weights unless `weight` says otherwise, with
/// terminals at two opposite corners.
pub fn grid(rows: usize, cols: usize, weight: impl Fn(usize) -> u64) -> Graph {
    let id = |r: usize, c: usize| (r * cols + c + 1) as u32;
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                edges.push(Edge::new(id(r, c), id(r, c + 1), weight(edges.len())));
            }
            if r + 1 < rows {
                edges.push(Edge::new(id(r, c), id(r + 1, c), weight(edges.len())));
            }
        }
    }
    Graph::new(rows * cols, edges, [id(0, 0), id(rows - 1, cols - 1)]).unwrap()
}
