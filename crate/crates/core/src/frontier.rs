//! Frontier-based construction of the BDD of cost-feasible minimal Steiner
//! trees.
//!
//! Each live node at level `i` remembers, for every vertex of the frontier
//! F_{i-1}, which component of chosen edges it belongs to, how many
//! unprocessed edge endpoints that component still has, how many terminals it
//! contains, and how many chosen edges touch the vertex. Processing edge
//! `e_i = (a, b)` first materializes a working row over F_{i-1} ∪ {a, b}
//! (vertices entering the frontier get fresh state derived from the graph),
//! applies the 0- or 1-branch update, runs the sink tests, and finally
//! projects the row onto F_i.
//!
//! Nodes whose [`MergeKey`]s match are merged, keeping the smaller cost.

use std::collections::hash_map::Entry;
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::bdd::{Bdd, BddNode, NodeId, Target};
use crate::graph::{Cost, Graph, Vertex};
use crate::order::EdgeOrder;

/// Default limit on the number of BDD nodes.
pub const DEFAULT_NODE_CAP: usize = 100_000_000;

/// State of one frontier vertex. Component-level fields (`unproc`, `term`)
/// are replicated on every member of the component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    /// Position (in the current row) of the smallest member of the component.
    pub comp: u32,
    /// Unprocessed edge endpoints over the component's frontier vertices.
    /// An unprocessed edge inside the component counts twice.
    pub unproc: u32,
    /// Terminals joined to the component by chosen edges.
    pub term: u32,
    /// Chosen edges touching this vertex.
    pub degree: u32,
}

/// Frontier information of a node, aligned with the frontier of its layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeInfo {
    pub slots: Vec<Slot>,
    /// Smallest cost of a chosen edge set reaching this node.
    pub cost: Cost,
}

impl NodeInfo {
    pub fn root() -> Self {
        NodeInfo {
            slots: Vec::new(),
            cost: 0,
        }
    }

    pub fn merge_key(&self) -> MergeKey {
        let mut key = Vec::with_capacity(self.slots.len() * 2);
        for s in &self.slots {
            key.push(s.comp);
            key.push((s.degree << 1) | u32::from(s.term > 0));
        }
        MergeKey(key.into_boxed_slice())
    }

    /// Folds another node with the same key into this one.
    pub fn merge(&mut self, other: &NodeInfo) {
        debug_assert_eq!(
            self.merge_key(),
            other.merge_key(),
            "merging nodes with different keys"
        );
        self.cost = self.cost.min(other.cost);
    }
}

/// Canonical encoding of the component partition of the frontier, the
/// per-component "has a terminal" flag and the per-vertex degrees. Cost and
/// exact terminal counts are not part of it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergeKey(Box<[u32]>);

/// Outcome of one branch out of a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Branch {
    One,
    Zero(ZeroReason),
    Node(NodeInfo),
}

/// Why a branch was sent to the 0-sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroReason {
    /// Both endpoints already in one component.
    Cycle,
    /// A non-terminal leaves the frontier with exactly one chosen edge.
    NonTerminalLeaf,
    /// Cost would exceed the bound.
    OverBudget,
    /// A component holding terminals has no unprocessed edges left but does
    /// not hold all of them.
    SealedComponent,
    /// All terminals are joined, but the chosen edges are not a minimal tree
    /// (a non-terminal leaf or a separate component remains).
    NotMinimal,
}

/// Precomputed bookkeeping for one step.
#[derive(Debug, Clone)]
struct StepPlan {
    cost: Cost,
    /// Vertices of F_{i-1} ∪ {a, b}, ascending.
    row: Vec<Vertex>,
    /// Row position of each F_{i-1} slot.
    from_prev: Vec<u32>,
    /// Row positions of vertices first touched at this step.
    entering: Vec<u32>,
    pos_a: u32,
    pos_b: u32,
    leaves_a: bool,
    leaves_b: bool,
    /// Row positions that stay on the frontier, in F_i order.
    keep: Vec<u32>,
}

/// Sink tests and node generation for a fixed graph and edge order.
pub struct Frontier<'g> {
    graph: &'g Graph,
    order: &'g EdgeOrder,
    plans: Vec<StepPlan>,
    terminal_count: u32,
}

impl<'g> Frontier<'g> {
    pub fn new(graph: &'g Graph, order: &'g EdgeOrder) -> Self {
        let plans = (1..=order.len())
            .map(|i| plan_step(graph, order, i))
            .collect();
        Frontier {
            graph,
            order,
            plans,
            terminal_count: graph.terminals().len() as u32,
        }
    }

    pub fn graph(&self) -> &Graph {
        self.graph
    }

    pub fn order(&self) -> &EdgeOrder {
        self.order
    }

    fn plan(&self, step: usize) -> &StepPlan {
        &self.plans[step - 1]
    }

    /// Spreads a node's state over the working row of `step`.
    fn materialize(&self, parent: &NodeInfo, step: usize) -> Vec<Slot> {
        let plan = self.plan(step);
        debug_assert_eq!(parent.slots.len(), plan.from_prev.len());
        let mut row = vec![
            Slot {
                comp: 0,
                unproc: 0,
                term: 0,
                degree: 0
            };
            plan.row.len()
        ];
        for (j, s) in parent.slots.iter().enumerate() {
            row[plan.from_prev[j] as usize] = Slot {
                comp: plan.from_prev[s.comp as usize],
                ..*s
            };
        }
        for &p in &plan.entering {
            let v = plan.row[p as usize];
            row[p as usize] = Slot {
                comp: p,
                unproc: self.graph.degree(v) as u32,
                term: u32::from(self.graph.is_terminal(v)),
                degree: 0,
            };
        }
        row
    }

    /// Applies branch `bit` of `step` to a materialized row.
    fn branch_row(
        &self,
        mut row: Vec<Slot>,
        cost: Cost,
        step: usize,
        bit: bool,
        theta: Cost,
    ) -> Branch {
        let plan = self.plan(step);
        let (pa, pb) = (plan.pos_a as usize, plan.pos_b as usize);
        let (ca, cb) = (row[pa].comp, row[pb].comp);
        let leaving = [(pa, plan.leaves_a), (pb, plan.leaves_b)];
        let is_terminal = |p: usize| self.graph.is_terminal(plan.row[p]);

        if !bit {
            for c in [ca, cb] {
                for s in row.iter_mut().filter(|s| s.comp == c) {
                    s.unproc -= 1;
                }
            }
            for c in [ca, cb] {
                let rep = row[c as usize];
                if rep.unproc == 0 && rep.term > 0 {
                    return Branch::Zero(ZeroReason::SealedComponent);
                }
            }
            for (p, leaves) in leaving {
                if leaves && row[p].degree == 1 && !is_terminal(p) {
                    return Branch::Zero(ZeroReason::NonTerminalLeaf);
                }
            }
            return Branch::Node(self.project(&row, cost, step));
        }

        if ca == cb {
            return Branch::Zero(ZeroReason::Cycle);
        }
        let rep = ca.min(cb);
        let unproc = row[ca as usize].unproc + row[cb as usize].unproc - 2;
        let term = row[ca as usize].term + row[cb as usize].term;
        for s in row.iter_mut().filter(|s| s.comp == ca || s.comp == cb) {
            *s = Slot {
                comp: rep,
                unproc,
                term,
                ..*s
            };
        }
        row[pa].degree += 1;
        row[pb].degree += 1;

        if term == self.terminal_count {
            let minimal = row.iter().enumerate().all(|(p, s)| {
                (s.degree == 0 || s.comp == rep) && (s.degree != 1 || is_terminal(p))
            });
            return if minimal {
                Branch::One
            } else {
                Branch::Zero(ZeroReason::NotMinimal)
            };
        }
        let new_cost = cost.saturating_add(plan.cost);
        if new_cost > theta {
            return Branch::Zero(ZeroReason::OverBudget);
        }
        for (p, leaves) in leaving {
            if leaves && row[p].degree == 1 && !is_terminal(p) {
                return Branch::Zero(ZeroReason::NonTerminalLeaf);
            }
        }
        if unproc == 0 && term > 0 {
            return Branch::Zero(ZeroReason::SealedComponent);
        }
        Branch::Node(self.project(&row, new_cost, step))
    }

    /// Restricts a working row to F_i, renaming components to their smallest
    /// remaining member.
    fn project(&self, row: &[Slot], cost: Cost, step: usize) -> NodeInfo {
        let plan = self.plan(step);
        let mut rename = vec![u32::MAX; row.len()];
        let slots = plan
            .keep
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let s = row[p as usize];
                let r = &mut rename[s.comp as usize];
                if *r == u32::MAX {
                    *r = j as u32;
                }
                Slot { comp: *r, ..s }
            })
            .collect();
        NodeInfo { slots, cost }
    }

    /// Both branches out of `parent` at `step` (0-branch first).
    pub fn branches(&self, parent: &NodeInfo, step: usize, theta: Cost) -> [Branch; 2] {
        let row = self.materialize(parent, step);
        let lo = self.branch_row(row.clone(), parent.cost, step, false, theta);
        let hi = self.branch_row(row, parent.cost, step, true, theta);
        [lo, hi]
    }

    pub fn branch(&self, parent: &NodeInfo, step: usize, bit: bool, theta: Cost) -> Branch {
        let row = self.materialize(parent, step);
        self.branch_row(row, parent.cost, step, bit, theta)
    }

    /// True iff taking `bit` at `step` completes a minimal Steiner tree.
    pub fn is_one_sink(&self, parent: &NodeInfo, step: usize, bit: bool) -> bool {
        matches!(self.branch(parent, step, bit, Cost::MAX), Branch::One)
    }

    /// True iff taking `bit` at `step` can never lead to a minimal Steiner
    /// tree with cost at most `theta`. Evaluated after [`Self::is_one_sink`]:
    /// a branch that completes a tree is never reported here.
    pub fn is_zero_sink(&self, parent: &NodeInfo, step: usize, bit: bool, theta: Cost) -> bool {
        matches!(self.branch(parent, step, bit, theta), Branch::Zero(_))
    }

    /// Child node info for a branch on which neither sink test fires.
    /// Panics if a sink test does fire.
    pub fn generate_node(&self, parent: &NodeInfo, step: usize, bit: bool) -> NodeInfo {
        match self.branch(parent, step, bit, Cost::MAX) {
            Branch::Node(info) => info,
            other => panic!("generate_node called on a sink branch: {other:?}"),
        }
    }
}

fn plan_step(g: &Graph, order: &EdgeOrder, step: usize) -> StepPlan {
    let e = g.edge(order.edge_at(step));
    let prev = order.frontier(step - 1);
    let mut row = prev.to_vec();
    for x in [e.u, e.v] {
        if let Err(p) = row.binary_search(&x) {
            row.insert(p, x);
        }
    }
    let pos = |x: Vertex| row.binary_search(&x).expect("endpoint in row") as u32;
    let from_prev = prev.iter().map(|&v| pos(v)).collect();
    let mut entering: Vec<u32> = [e.u, e.v]
        .into_iter()
        .filter(|x| prev.binary_search(x).is_err())
        .map(pos)
        .collect();
    entering.dedup();
    let next = order.frontier(step);
    let keep = row
        .iter()
        .enumerate()
        .filter(|(_, v)| next.binary_search(v).is_ok())
        .map(|(p, _)| p as u32)
        .collect();
    StepPlan {
        cost: e.cost,
        pos_a: pos(e.u),
        pos_b: pos(e.v),
        leaves_a: order.last_step(e.u) == step,
        leaves_b: order.last_step(e.v) == step,
        from_prev,
        entering,
        keep,
        row,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructOptions {
    pub theta: Cost,
    pub node_cap: usize,
    /// Merge nodes with equal keys. Turning this off yields a decision tree
    /// and is only useful for checking the merge rule.
    pub merge: bool,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            theta: Cost::MAX,
            node_cap: DEFAULT_NODE_CAP,
            merge: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("enumeration needs at least 2 terminals, found {0}")]
    TooFewTerminals(usize),
    #[error("node cap of {cap} exceeded at step {step}; nodes per layer so far: {layer_sizes:?}")]
    NodeCapExceeded {
        cap: usize,
        step: usize,
        layer_sizes: Vec<usize>,
    },
}

#[derive(Debug, Clone, Default)]
pub struct ConstructStats {
    /// |N_i| for i = 0..=|E| (N_0 is the root layer).
    pub layer_sizes: Vec<usize>,
    pub merges: u64,
    pub frontier_width: usize,
    pub elapsed: Duration,
}

impl ConstructStats {
    pub fn max_layer(&self) -> usize {
        self.layer_sizes.iter().copied().max().unwrap_or(0)
    }
}

/// Builds the BDD for `g` under `order`.
pub fn construct(
    g: &Graph,
    order: &EdgeOrder,
    opts: ConstructOptions,
) -> Result<(Bdd, ConstructStats), ConstructError> {
    construct_with(g, order, opts, |_, _, _| {})
}

/// [`construct`] with a callback seeing every created node together with
/// its frontier information (before any later merge lowers its cost).
pub fn construct_with(
    g: &Graph,
    order: &EdgeOrder,
    opts: ConstructOptions,
    mut on_node: impl FnMut(NodeId, usize, &NodeInfo),
) -> Result<(Bdd, ConstructStats), ConstructError> {
    let terminals = g.terminals().len();
    if terminals < 2 {
        return Err(ConstructError::TooFewTerminals(terminals));
    }
    let start = Instant::now();
    let frontier = Frontier::new(g, order);
    let m = order.len();

    let mut nodes: Vec<BddNode> = Vec::new();
    let mut stats = ConstructStats {
        layer_sizes: vec![1],
        frontier_width: order.frontier_width(),
        ..Default::default()
    };
    if m == 0 {
        return Ok((
            Bdd::from_parts(nodes, Target::Zero, Vec::new()),
            finish(stats, start),
        ));
    }

    let root = NodeInfo::root();
    on_node(NodeId(0), 1, &root);
    nodes.push(BddNode {
        level: 1,
        lo: Target::Zero,
        hi: Target::Zero,
        cost: 0,
    });
    // Live layer: (global id, info) of the nodes deciding the current edge.
    let mut layer: Vec<(NodeId, NodeInfo)> = vec![(NodeId(0), root)];

    for step in 1..=m {
        let base = nodes.len();
        let mut next: Vec<NodeInfo> = Vec::new();
        let mut table: FxHashMap<MergeKey, u32> = FxHashMap::default();

        for (id, info) in &layer {
            let [lo, hi] = frontier.branches(info, step, opts.theta);
            let mut targets = [Target::Zero; 2];
            for (slot, branch) in targets.iter_mut().zip([lo, hi]) {
                *slot = match branch {
                    Branch::One => Target::One,
                    Branch::Zero(_) => Target::Zero,
                    // Nothing is left to join the remaining terminals.
                    Branch::Node(_) if step == m => Target::Zero,
                    Branch::Node(child) => {
                        let local = if opts.merge {
                            match table.entry(child.merge_key()) {
                                Entry::Occupied(o) => {
                                    let local = *o.get();
                                    next[local as usize].merge(&child);
                                    stats.merges += 1;
                                    local
                                }
                                Entry::Vacant(v) => {
                                    let local = next.len() as u32;
                                    v.insert(local);
                                    next.push(child);
                                    local
                                }
                            }
                        } else {
                            next.push(child);
                            next.len() as u32 - 1
                        };
                        Target::Node(NodeId((base + local as usize) as u32))
                    }
                };
            }
            let node = &mut nodes[id.index()];
            node.lo = targets[0];
            node.hi = targets[1];
            if base + next.len() > opts.node_cap {
                stats.layer_sizes.push(next.len());
                return Err(ConstructError::NodeCapExceeded {
                    cap: opts.node_cap,
                    step,
                    layer_sizes: stats.layer_sizes,
                });
            }
        }

        stats.layer_sizes.push(next.len());
        layer.clear();
        for (local, info) in next.into_iter().enumerate() {
            let id = NodeId((base + local) as u32);
            on_node(id, step + 1, &info);
            nodes.push(BddNode {
                level: step as u32 + 1,
                lo: Target::Zero,
                hi: Target::Zero,
                cost: info.cost,
            });
            layer.push((id, info));
        }
    }
    debug_assert!(layer.is_empty());

    let bdd = Bdd::from_parts(nodes, Target::Node(NodeId(0)), order.permutation().to_vec());
    Ok((bdd, finish(stats, start)))
}

fn finish(mut stats: ConstructStats, start: Instant) -> ConstructStats {
    stats.elapsed = start.elapsed();
    stats
}
