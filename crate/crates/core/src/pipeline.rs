//! End-to-end run: simplify, select seeds, order, construct, reduce,
//! traverse, and map trees back to the input graph.

use std::io::{self, Write};
use std::time::Duration;

use serde::Serialize;
use thiserror::Error;

use crate::bdd::Bdd;
use crate::frontier::{
    construct, ConstructError, ConstructOptions, ConstructStats, DEFAULT_NODE_CAP,
};
use crate::graph::{Cost, Graph, Restriction, UNBOUNDED};
use crate::order::{EdgeOrder, StartRule};
use crate::seed::{resolve_root, select_seeds, tosp_tree, union_of, SeedConfig, SeedError};
use crate::simplify::{simplify, ExpandError, SimplificationMap};
use crate::traverse::{enumerate, EnumerateError, EnumerateOptions, EnumerateStats};
use crate::tree::{SteinerTree, TreeRecord};

/// Cost bound for a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Theta {
    Unbounded,
    Absolute(Cost),
    /// Multiple of the cheapest seed tree's cost, rounded down.
    Ratio(f64),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub theta: Theta,
    pub k: usize,
    /// `None` builds the BDD on the whole (simplified) graph.
    pub seeds: Option<SeedConfig>,
    /// Extra seed trees in edge indices of the input graph.
    pub extra_seeds: Vec<SteinerTree>,
    pub simplify: bool,
    pub order: StartRule,
    pub node_cap: usize,
    /// Trees kept at the 1-sink; defaults to 10·k.
    pub sink_cap: Option<usize>,
    pub entry_budget: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theta: Theta::Ratio(1.2),
            k: 1000,
            seeds: Some(SeedConfig::default()),
            extra_seeds: Vec::new(),
            simplify: true,
            order: StartRule::MinDegreeTerminal,
            node_cap: DEFAULT_NODE_CAP,
            sink_cap: None,
            entry_budget: None,
        }
    }
}

impl RunConfig {
    /// Whole graph, no simplification, no cost bound.
    pub fn exact(k: usize) -> Self {
        RunConfig {
            theta: Theta::Unbounded,
            k,
            seeds: None,
            simplify: false,
            ..Default::default()
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("enumeration needs at least 2 terminals, found {0}")]
    TooFewTerminals(usize),
    #[error("invalid cost bound '{0}'")]
    BadTheta(String),
    #[error("theta ratio must be a finite non-negative number, got {0}")]
    BadRatio(f64),
    #[error("seed selection failed: {0}")]
    Seed(#[from] SeedError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Enumerate(#[from] EnumerateError),
    #[error("seed tree does not match the graph: {0}")]
    Expand(#[from] ExpandError),
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct GraphSize {
    pub v: usize,
    pub e: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct PreprocessedSize {
    pub v: usize,
    pub e: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq, Eq)]
pub struct BddSize {
    pub nodes: usize,
    pub nodes_reduced: usize,
    pub max_layer: usize,
    pub frontier_width: usize,
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq)]
pub struct Timing {
    pub construct: f64,
    pub reduce: f64,
    pub traverse: f64,
}

#[derive(Debug, Clone, Copy, Default, Serialize, PartialEq)]
pub struct TreeSummary {
    pub count: usize,
    pub min_cost: Option<Cost>,
    pub avg_cost: Option<f64>,
}

/// Run summary; serialized as the JSON report.
#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct Report {
    pub graph: GraphSize,
    pub preprocessed: PreprocessedSize,
    pub seeds: usize,
    pub best_seed_cost: Option<Cost>,
    pub theta: Option<Cost>,
    pub bdd: BddSize,
    pub timing_ms: Timing,
    pub trees: TreeSummary,
    pub peak_entries: usize,
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Trees in edge indices of the input graph, sorted by (cost, edges).
    pub trees: Vec<SteinerTree>,
    pub report: Report,
    /// Reduced BDD over the working graph.
    pub bdd: Bdd,
    pub construct_stats: ConstructStats,
    pub enumerate_stats: EnumerateStats,
}

/// The graph the BDD is built on, and how to map its trees back.
pub struct Prepared {
    pub simplified: Graph,
    pub map: SimplificationMap,
    pub working: Restriction,
    pub seeds: Vec<SteinerTree>,
    pub best_seed_cost: Option<Cost>,
}

impl Prepared {
    /// Maps a tree on the working graph to the input graph.
    pub fn lift(&self, tree: &SteinerTree) -> Result<SteinerTree, ExpandError> {
        let on_simplified = SteinerTree::new(self.working.to_parent(tree.edges()), tree.cost());
        self.map.expand_tree(&on_simplified)
    }
}

/// Simplification and seed selection.
pub fn prepare(g: &Graph, cfg: &RunConfig) -> Result<Prepared, PipelineError> {
    let (simplified, map) = if cfg.simplify {
        simplify(g)
    } else {
        (g.clone(), SimplificationMap::identity(g.edge_count()))
    };

    let mut extra = Vec::with_capacity(cfg.extra_seeds.len());
    for t in &cfg.extra_seeds {
        let edges = map.contract_edges(t.edges())?;
        extra.push(SteinerTree::from_graph(&simplified, edges));
    }

    let (working, seeds) = match &cfg.seeds {
        Some(seed_cfg) => {
            let mut sel = select_seeds(&simplified, seed_cfg)?;
            for t in extra {
                if !sel.seeds.contains(&t) {
                    sel.seeds.push(t);
                }
            }
            let sel = union_of(&simplified, sel.seeds, sel.shortfall);
            (sel.subgraph, sel.seeds)
        }
        None => {
            let all: Vec<usize> = (0..simplified.edge_count()).collect();
            (simplified.restrict(&all), extra)
        }
    };

    let mut best_seed_cost = seeds.iter().map(SteinerTree::cost).min();
    if best_seed_cost.is_none() && matches!(cfg.theta, Theta::Ratio(_)) {
        let root = resolve_root(&simplified, cfg.seeds.map(|s| s.root).unwrap_or_default())?;
        best_seed_cost = Some(tosp_tree(&simplified, root)?.cost());
    }

    Ok(Prepared {
        simplified,
        map,
        working,
        seeds,
        best_seed_cost,
    })
}

pub fn resolve_theta(theta: Theta, best_seed_cost: Option<Cost>) -> Result<Cost, PipelineError> {
    match theta {
        Theta::Unbounded => Ok(UNBOUNDED),
        Theta::Absolute(c) => Ok(c),
        Theta::Ratio(r) => {
            if !r.is_finite() || r < 0.0 {
                return Err(PipelineError::BadRatio(r));
            }
            let base = best_seed_cost.expect("ratio needs a seed cost") as f64;
            Ok((r * base).floor() as Cost)
        }
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Parses a cost bound given in input units (`inf` for no bound). Digits
/// past the graph's weight scale are truncated.
pub fn parse_theta(text: &str, scale: u32) -> Result<Theta, PipelineError> {
    let bad = || PipelineError::BadTheta(text.to_owned());
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(Theta::Unbounded);
    }
    let (int, frac) = t.split_once('.').unwrap_or((t, ""));
    let digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
        return Err(bad());
    }
    let mut s = int.to_owned();
    let scale = scale as usize;
    s.extend(frac.chars().chain(std::iter::repeat('0')).take(scale));
    if s.is_empty() {
        return Ok(Theta::Absolute(0));
    }
    s.parse::<Cost>().map(Theta::Absolute).map_err(|_| bad())
}

/// A constructed and reduced BDD together with what produced it.
pub struct Built {
    pub prepared: Prepared,
    pub theta: Cost,
    /// Before reduction.
    pub raw: Bdd,
    pub bdd: Bdd,
    pub construct_stats: ConstructStats,
    pub reduce_time: Duration,
}

/// Runs every stage up to and including reduction.
pub fn build(g: &Graph, cfg: &RunConfig) -> Result<Built, PipelineError> {
    let t = g.terminals().len();
    if t < 2 {
        return Err(PipelineError::TooFewTerminals(t));
    }
    let prepared = prepare(g, cfg)?;
    let theta = resolve_theta(cfg.theta, prepared.best_seed_cost)?;
    let work = &prepared.working.graph;

    let order = EdgeOrder::bfs(work, cfg.order);
    let (raw, construct_stats) = construct(
        work,
        &order,
        ConstructOptions {
            theta,
            node_cap: cfg.node_cap,
            merge: true,
        },
    )?;
    let reduce_start = std::time::Instant::now();
    let bdd = raw.reduce();
    let reduce_time = reduce_start.elapsed();
    Ok(Built {
        prepared,
        theta,
        raw,
        bdd,
        construct_stats,
        reduce_time,
    })
}

pub fn run(g: &Graph, cfg: &RunConfig) -> Result<RunOutput, PipelineError> {
    let built = build(g, cfg)?;
    let work = &built.prepared.working.graph;
    let theta = built.theta;

    let mut opts = EnumerateOptions::new(cfg.k, theta);
    if let Some(cap) = cfg.sink_cap {
        opts.sink_cap = cap;
    }
    if let Some(budget) = cfg.entry_budget {
        opts.entry_budget = budget;
    }
    let (found, enumerate_stats) = enumerate(&built.bdd, work, opts)?;
    let mut trees = found
        .iter()
        .map(|t| built.prepared.lift(t))
        .collect::<Result<Vec<_>, _>>()?;
    trees.sort();

    let count = trees.len();
    let report = Report {
        graph: GraphSize {
            v: g.vertex_count(),
            e: g.edge_count(),
            t: g.terminals().len(),
        },
        preprocessed: PreprocessedSize {
            v: work.active_vertex_count(),
            e: work.edge_count(),
        },
        seeds: built.prepared.seeds.len(),
        best_seed_cost: built.prepared.best_seed_cost,
        theta: (theta != UNBOUNDED).then_some(theta),
        bdd: BddSize {
            nodes: built.raw.len(),
            nodes_reduced: built.bdd.len(),
            max_layer: built.construct_stats.max_layer(),
            frontier_width: built.construct_stats.frontier_width,
        },
        timing_ms: Timing {
            construct: ms(built.construct_stats.elapsed),
            reduce: ms(built.reduce_time),
            traverse: ms(enumerate_stats.elapsed),
        },
        trees: TreeSummary {
            count,
            min_cost: trees.first().map(SteinerTree::cost),
            avg_cost: (count > 0)
                .then(|| trees.iter().map(|t| t.cost() as f64).sum::<f64>() / count as f64),
        },
        peak_entries: enumerate_stats.peak_live_entries,
        truncated: enumerate_stats.truncated,
    };
    Ok(RunOutput {
        trees,
        report,
        bdd: built.bdd,
        construct_stats: built.construct_stats,
        enumerate_stats,
    })
}

/// Writes one `{"cost": .., "edges": [[u, v], ..]}` line per tree.
pub fn write_jsonl(mut out: impl Write, g: &Graph, trees: &[SteinerTree]) -> io::Result<()> {
    for t in trees {
        serde_json::to_writer(&mut out, &t.to_record(g))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Reads trees written by [`write_jsonl`]. Each `[u, v]` pair is matched to
/// an unused edge between `u` and `v` (cheapest first, then lowest index).
pub fn read_jsonl(text: &str, g: &Graph) -> Result<Vec<SteinerTree>, String> {
    let mut trees = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: TreeRecord =
            serde_json::from_str(line).map_err(|e| format!("line {}: {e}", i + 1))?;
        let mut used = Vec::new();
        for [u, v] in rec.edges {
            if u as usize > g.vertex_count() || v as usize > g.vertex_count() || u == 0 || v == 0 {
                return Err(format!("line {}: no edge {u}-{v}", i + 1));
            }
            let pick = g
                .incident(u)
                .iter()
                .copied()
                .filter(|&e| g.edge(e).other(u) == v && !used.contains(&e))
                .min_by_key(|&e| (g.edge(e).cost, e))
                .ok_or_else(|| format!("line {}: no edge {u}-{v}", i + 1))?;
            used.push(pick);
        }
        trees.push(SteinerTree::from_graph(g, used));
    }
    Ok(trees)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn exact_run_on_triangle() {
        let g = triangle();
        let mut cfg = RunConfig::exact(10);
        cfg.theta = Theta::Absolute(3);
        let out = run(&g, &cfg).unwrap();
        let costs: Vec<_> = out.trees.iter().map(|t| t.cost()).collect();
        assert_eq!(costs, vec![2, 3]);
        assert_eq!(out.report.trees.min_cost, Some(2));
    }

    #[test]
    fn default_run_on_triangle() {
        let g = triangle();
        let cfg = RunConfig {
            theta: Theta::Absolute(3),
            ..Default::default()
        };
        let out = run(&g, &cfg).unwrap();
        let edges: Vec<_> = out.trees.iter().map(|t| t.edges().to_vec()).collect();
        assert_eq!(edges, vec![vec![0, 1], vec![2]]);
        assert_eq!(out.report.preprocessed.e, 2);
    }

    #[test]
    fn ratio_uses_best_seed() {
        let g = triangle();
        let cfg = RunConfig::default();
        let out = run(&g, &cfg).unwrap();
        // floor(1.2 * 2) = 2: only the cheapest tree.
        assert_eq!(out.report.theta, Some(2));
        assert_eq!(out.trees.len(), 1);
    }

    #[test]
    fn too_few_terminals() {
        let g = Graph::new(3, triangle().edges().to_vec(), [2]).unwrap();
        assert!(matches!(
            run(&g, &RunConfig::default()),
            Err(PipelineError::TooFewTerminals(1))
        ));
    }

    #[test]
    fn theta_parsing() {
        assert_eq!(parse_theta("3", 0).unwrap(), Theta::Absolute(3));
        assert_eq!(parse_theta("1.5", 2).unwrap(), Theta::Absolute(150));
        assert_eq!(parse_theta("1.239", 2).unwrap(), Theta::Absolute(123));
        assert_eq!(parse_theta("inf", 0).unwrap(), Theta::Unbounded);
        assert!(parse_theta("-1", 0).is_err());
        assert!(parse_theta("x", 0).is_err());
    }

    #[test]
    fn jsonl_roundtrip() {
        let g = triangle();
        let trees = vec![
            SteinerTree::from_graph(&g, vec![0, 1]),
            SteinerTree::from_graph(&g, vec![2]),
        ];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &g, &trees).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "{\"cost\":2,\"edges\":[[1,2],[2,3]]}\n{\"cost\":3,\"edges\":[[1,3]]}\n"
        );
        assert_eq!(read_jsonl(&text, &g).unwrap(), trees);
    }
}
