//! Top-k traversal: a level-synchronous sweep that keeps the k cheapest
//! partial costs per node and decodes the trees reaching the 1-sink.
//!
//! Cost entries of level `i` are dropped once level `i + 1` is complete.
//! Decoding needs the path behind each entry, so every retained entry also
//! appends a back-reference record to an arena; the arena only grows and is
//! bounded by the total number of retained entries.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bdd::{Bdd, Target};
use crate::graph::{Cost, Graph};
use crate::tree::SteinerTree;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    /// Cost entries kept per node.
    pub k: usize,
    pub theta: Cost,
    /// Most trees collected at the 1-sink; the cheapest are kept.
    pub sink_cap: usize,
    /// Abort if more cost entries than this are alive at once.
    pub entry_budget: usize,
}

impl EnumerateOptions {
    pub fn new(k: usize, theta: Cost) -> Self {
        EnumerateOptions {
            k,
            theta,
            sink_cap: k.saturating_mul(10),
            entry_budget: usize::MAX,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("k must be at least 1")]
    ZeroK,
    #[error("live cost entries reached {live} at level {level}, over the budget of {budget}")]
    EntryBudgetExceeded {
        budget: usize,
        live: usize,
        level: u32,
    },
}

#[derive(Debug, Clone, Default)]
pub struct EnumerateStats {
    /// Largest number of cost entries alive at once (sink output excluded).
    pub peak_live_entries: usize,
    /// Largest number of nodes on one level of the traversed BDD.
    pub max_layer_width: usize,
    pub arena_records: usize,
    /// Trees that reached the 1-sink within the cost bound.
    pub sink_arrivals: u64,
    /// True if more than `sink_cap` trees arrived and some were dropped.
    pub truncated: bool,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, Copy)]
struct Record {
    parent: u32,
    /// Edge index taken on a 1-arc, or `NONE` for a 0-arc.
    edge: u32,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    cost: Cost,
    record: u32,
}

/// A cost arriving at a node, not yet committed to the arena. Ordered by
/// (cost, parent record, arc bit); parent records are numbered in
/// (node, entry) order, which fixes ties deterministically.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    cost: Cost,
    parent: u32,
    /// Edge taken on a 1-arc, `NONE` for a 0-arc.
    edge: u32,
}

impl Candidate {
    fn key(&self) -> (Cost, u32, bool) {
        (self.cost, self.parent, self.edge != NONE)
    }

    fn record(&self) -> Record {
        Record {
            parent: self.parent,
            edge: self.edge,
        }
    }
}

/// Merges sorted `incoming` into sorted `list`, keeping the `k` smallest.
fn merge_truncate(list: &mut Vec<Candidate>, incoming: impl Iterator<Item = Candidate>, k: usize) {
    let old = std::mem::take(list);
    let mut out = Vec::with_capacity(k.min(old.len() + 8));
    let mut a = old.into_iter().peekable();
    let mut b = incoming.peekable();
    while out.len() < k {
        let take_a = match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => x.key().cmp(&y.key()) != Ordering::Greater,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        out.push(if take_a { a.next() } else { b.next() }.expect("peeked"));
    }
    *list = out;
}

/// Enumerates trees represented by `bdd` (built on `g`) with cost at most
/// `theta`. The `k` cheapest represented trees are always returned; more
/// trees within the bound may be returned as well. Output is sorted by
/// (cost, edge set).
pub fn enumerate(
    bdd: &Bdd,
    g: &Graph,
    opts: EnumerateOptions,
) -> Result<(Vec<SteinerTree>, EnumerateStats), EnumerateError> {
    if opts.k == 0 {
        return Err(EnumerateError::ZeroK);
    }
    let start = Instant::now();
    let k = opts.k;
    let mut stats = EnumerateStats {
        max_layer_width: bdd.layer_sizes().into_iter().max().unwrap_or(0),
        ..Default::default()
    };
    let mut arena: Vec<Record> = Vec::new();
    let mut sink: Vec<Candidate> = Vec::new();

    let root = match bdd.root() {
        Target::Zero => return Ok((Vec::new(), finish(stats, start))),
        // A bare 1-sink stands for the empty tree.
        Target::One => return Ok((vec![SteinerTree::new(Vec::new(), 0)], finish(stats, start))),
        Target::Node(id) => id,
    };

    let nodes = bdd.nodes();
    // Level boundaries: nodes are sorted by level.
    let mut level_start = vec![0usize];
    for i in 1..nodes.len() {
        if nodes[i].level != nodes[i - 1].level {
            level_start.push(i);
        }
    }
    level_start.push(nodes.len());
    debug_assert_eq!(root.index(), 0);

    let mut current: Vec<Vec<Entry>> = vec![vec![Entry {
        cost: 0,
        record: NONE,
    }]];
    let mut current_live = 1usize;
    stats.peak_live_entries = 1;

    for w in level_start.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let level = nodes[lo].level;
        let edge_idx = bdd.edge_at_level(level);
        let edge_cost = g.edge(edge_idx).cost;
        let next_lo = hi;
        let next_hi = level_start
            .iter()
            .copied()
            .find(|&s| s > hi)
            .unwrap_or(nodes.len());
        let mut next: Vec<Vec<Candidate>> = vec![Vec::new(); next_hi - next_lo];
        let mut next_live = 0usize;

        for (offset, entries) in current.iter().enumerate() {
            let node = &nodes[lo + offset];
            for bit in [false, true] {
                let add = if bit { edge_cost } else { 0 };
                let extended = entries
                    .iter()
                    .map(|e| Candidate {
                        cost: e.cost.saturating_add(add),
                        parent: e.record,
                        edge: if bit { edge_idx as u32 } else { NONE },
                    })
                    .take_while(|c| c.cost <= opts.theta);
                match node.arc(bit) {
                    Target::Zero => {}
                    Target::One => {
                        for c in extended {
                            stats.sink_arrivals += 1;
                            sink.push(c);
                        }
                        if sink.len() > opts.sink_cap.saturating_mul(2).max(1024) {
                            sink.sort_by_key(Candidate::key);
                            sink.truncate(opts.sink_cap);
                            stats.truncated = true;
                        }
                    }
                    Target::Node(child) => {
                        debug_assert!(child.index() >= next_lo && child.index() < next_hi);
                        let list = &mut next[child.index() - next_lo];
                        let before = list.len();
                        merge_truncate(list, extended, k);
                        next_live = next_live + list.len() - before;
                    }
                }
            }
            let live = current_live + next_live;
            stats.peak_live_entries = stats.peak_live_entries.max(live);
            if live > opts.entry_budget {
                return Err(EnumerateError::EntryBudgetExceeded {
                    budget: opts.entry_budget,
                    live,
                    level,
                });
            }
        }

        // Commit level + 1 to the arena; level's own entries are released.
        current = next
            .into_iter()
            .map(|cands| {
                cands
                    .into_iter()
                    .map(|c| {
                        arena.push(c.record());
                        Entry {
                            cost: c.cost,
                            record: arena.len() as u32 - 1,
                        }
                    })
                    .collect()
            })
            .collect();
        current_live = next_live;
        if next_lo == nodes.len() {
            break;
        }
    }

    sink.sort_by_key(Candidate::key);
    if sink.len() > opts.sink_cap {
        sink.truncate(opts.sink_cap);
        stats.truncated = true;
    }

    let mut trees: Vec<SteinerTree> = sink
        .iter()
        .map(|c| {
            let mut edges = Vec::new();
            let mut rec = c.record();
            loop {
                if rec.edge != NONE {
                    edges.push(rec.edge as usize);
                }
                if rec.parent == NONE {
                    break;
                }
                rec = arena[rec.parent as usize];
            }
            SteinerTree::new(edges, c.cost)
        })
        .collect();
    trees.sort();
    stats.arena_records = arena.len();
    Ok((trees, finish(stats, start)))
}

fn finish(mut stats: EnumerateStats, start: Instant) -> EnumerateStats {
    stats.elapsed = start.elapsed();
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontier::{construct, ConstructOptions};
    use crate::graph::fixtures::*;
    use crate::graph::{Edge, UNBOUNDED};
    use crate::order::{EdgeOrder, StartRule};

    fn bdd_of(g: &Graph) -> Bdd {
        let order = EdgeOrder::bfs(g, StartRule::MinDegreeTerminal);
        construct(g, &order, ConstructOptions::default())
            .unwrap()
            .0
            .reduce()
    }

    /// Four parallel 1-2 edges of costs 4, 1, 3, 2.
    fn bundle() -> Graph {
        let edges = [4, 1, 3, 2].map(|c| Edge::new(1, 2, c)).to_vec();
        Graph::new(2, edges, [1, 2]).unwrap()
    }

    fn cand(cost: Cost, parent: u32) -> Candidate {
        Candidate {
            cost,
            parent,
            edge: NONE,
        }
    }

    #[test]
    fn merge_keeps_k_smallest() {
        let mut list = vec![cand(1, 0), cand(5, 1)];
        merge_truncate(
            &mut list,
            [cand(2, 2), cand(3, 3), cand(9, 4)].into_iter(),
            3,
        );
        let costs: Vec<_> = list.iter().map(|c| c.cost).collect();
        assert_eq!(costs, vec![1, 2, 3]);
    }

    #[test]
    fn ties_follow_parent_order() {
        let mut list = vec![cand(2, 5)];
        merge_truncate(&mut list, [cand(2, 1)].into_iter(), 1);
        assert_eq!(list[0].parent, 1);
    }

    #[test]
    fn triangle_trees() {
        let g = triangle();
        let (trees, stats) =
            enumerate(&bdd_of(&g), &g, EnumerateOptions::new(10, UNBOUNDED)).unwrap();
        let edges: Vec<_> = trees
            .iter()
            .map(|t| (t.cost(), t.edges().to_vec()))
            .collect();
        assert_eq!(edges, vec![(2, vec![0, 1]), (3, vec![2])]);
        assert_eq!(stats.sink_arrivals, 2);
        assert!(!stats.truncated);
    }

    #[test]
    fn theta_drops_expensive_trees() {
        let g = bundle();
        let (trees, _) = enumerate(&bdd_of(&g), &g, EnumerateOptions::new(10, 2)).unwrap();
        let costs: Vec<_> = trees.iter().map(|t| t.cost()).collect();
        assert_eq!(costs, vec![1, 2]);
    }

    #[test]
    fn k_cheapest_are_present() {
        let g = bundle();
        let b = bdd_of(&g);
        for k in 1..=4 {
            let (trees, stats) = enumerate(&b, &g, EnumerateOptions::new(k, UNBOUNDED)).unwrap();
            let costs: Vec<_> = trees.iter().take(k).map(|t| t.cost()).collect();
            assert_eq!(costs, (1..=k as Cost).collect::<Vec<_>>());
            assert!(stats.peak_live_entries <= 2 * k * stats.max_layer_width);
        }
    }

    #[test]
    fn sink_cap_truncates() {
        let g = bundle();
        let mut opts = EnumerateOptions::new(4, UNBOUNDED);
        opts.sink_cap = 2;
        let (trees, stats) = enumerate(&bdd_of(&g), &g, opts).unwrap();
        assert!(stats.truncated);
        assert_eq!(
            trees.iter().map(|t| t.cost()).collect::<Vec<_>>(),
            vec![1, 2]
        );
    }

    #[test]
    fn errors() {
        let g = triangle();
        let b = bdd_of(&g);
        assert_eq!(
            enumerate(&b, &g, EnumerateOptions::new(0, UNBOUNDED)).unwrap_err(),
            EnumerateError::ZeroK
        );
        let mut opts = EnumerateOptions::new(5, UNBOUNDED);
        opts.entry_budget = 1;
        assert!(matches!(
            enumerate(&b, &g, opts),
            Err(EnumerateError::EntryBudgetExceeded { budget: 1, .. })
        ));
    }

    #[test]
    fn sink_roots() {
        let g = triangle();
        let zero = Bdd::from_parts(Vec::new(), Target::Zero, vec![0, 1, 2]);
        assert!(enumerate(&zero, &g, EnumerateOptions::new(1, UNBOUNDED))
            .unwrap()
            .0
            .is_empty());
    }
}
