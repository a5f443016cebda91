//! Layered BDD over edge variables, plus reduction, path counting and the
//! text dump.
//!
//! A node at level `i` decides edge `e_i` of the edge order; its arcs go to
//! nodes at level `i + 1` or to a sink. A root-to-1-sink path stands for the
//! set of edges whose 1-arcs it takes. Edges after the point where a path
//! enters the 1-sink are absent.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::graph::Cost;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Zero,
    One,
    Node(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BddNode {
    /// 1-based step whose edge this node decides.
    pub level: u32,
    pub lo: Target,
    pub hi: Target,
    /// Smallest cost over all root-to-node paths.
    pub cost: Cost,
}

impl BddNode {
    pub fn arc(&self, bit: bool) -> Target {
        if bit {
            self.hi
        } else {
            self.lo
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bdd {
    /// Sorted by level; `nodes[0]` is the root when `root` is a node.
    nodes: Vec<BddNode>,
    root: Target,
    /// Edge index decided at each level (level `i` -> `edge_order[i - 1]`).
    edge_order: Vec<usize>,
}

impl Bdd {
    pub(crate) fn from_parts(nodes: Vec<BddNode>, root: Target, edge_order: Vec<usize>) -> Self {
        debug_assert!(nodes.windows(2).all(|w| w[0].level <= w[1].level));
        Bdd {
            nodes,
            root,
            edge_order,
        }
    }

    pub fn root(&self) -> Target {
        self.root
    }

    pub fn nodes(&self) -> &[BddNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &BddNode {
        &self.nodes[id.index()]
    }

    /// Number of non-sink nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of edge variables (the edge count of the underlying graph).
    pub fn num_vars(&self) -> usize {
        self.edge_order.len()
    }

    pub fn edge_at_level(&self, level: u32) -> usize {
        self.edge_order[level as usize - 1]
    }

    pub fn edge_order(&self) -> &[usize] {
        &self.edge_order
    }

    /// Node counts per level, index 0 unused.
    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.edge_order.len() + 1];
        for n in &self.nodes {
            sizes[n.level as usize] += 1;
        }
        sizes
    }

    /// Drops every node from which the 1-sink cannot be reached, pointing
    /// arcs into them at the 0-sink instead. Works from the deepest level up,
    /// so a node whose arcs both lead to the 0-sink or to dropped nodes is
    /// dropped in turn.
    pub fn reduce(&self) -> Bdd {
        let n = self.nodes.len();
        let mut dead = vec![false; n];
        let is_dead = |t: Target, dead: &[bool]| match t {
            Target::Zero => true,
            Target::One => false,
            Target::Node(id) => dead[id.index()],
        };
        for i in (0..n).rev() {
            let node = &self.nodes[i];
            dead[i] = is_dead(node.lo, &dead) && is_dead(node.hi, &dead);
        }

        let mut new_id = vec![u32::MAX; n];
        let mut next = 0u32;
        for i in 0..n {
            if !dead[i] {
                new_id[i] = next;
                next += 1;
            }
        }
        let remap = |t: Target| match t {
            Target::Node(id) if dead[id.index()] => Target::Zero,
            Target::Node(id) => Target::Node(NodeId(new_id[id.index()])),
            other => other,
        };
        let nodes = self
            .nodes
            .iter()
            .zip(&dead)
            .filter(|(_, &d)| !d)
            .map(|(node, _)| BddNode {
                level: node.level,
                lo: remap(node.lo),
                hi: remap(node.hi),
                cost: node.cost,
            })
            .collect();
        Bdd {
            nodes,
            root: remap(self.root),
            edge_order: self.edge_order.clone(),
        }
    }

    /// Exact number of root-to-1-sink paths.
    pub fn count_paths(&self) -> BigUint {
        let mut counts: Vec<BigUint> = vec![BigUint::default(); self.nodes.len()];
        let value = |t: Target, counts: &[BigUint]| -> BigUint {
            match t {
                Target::Zero => BigUint::default(),
                Target::One => BigUint::from(1u32),
                Target::Node(id) => counts[id.index()].clone(),
            }
        };
        for i in (0..self.nodes.len()).rev() {
            let node = &self.nodes[i];
            counts[i] = value(node.lo, &counts) + value(node.hi, &counts);
        }
        value(self.root, &counts)
    }

    /// Nodes with both arcs into the 0-sink.
    pub fn zero_zero_nodes(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.lo == Target::Zero && n.hi == Target::Zero)
            .count()
    }

    /// For every node, whether the 1-sink is reachable from it.
    pub fn reaches_one(&self) -> Vec<bool> {
        let mut ok = vec![false; self.nodes.len()];
        for i in (0..self.nodes.len()).rev() {
            let node = &self.nodes[i];
            ok[i] = [node.lo, node.hi].iter().any(|t| match t {
                Target::One => true,
                Target::Zero => false,
                Target::Node(id) => ok[id.index()],
            });
        }
        ok
    }

    /// Text dump: a header `bdd <nodes> <edges>` and one line
    /// `<id> <level> <lo> <hi>` per node. Sinks are `0` and `1`; nodes are
    /// numbered from 2 in level order, so the root is 2 unless the diagram is
    /// a bare sink.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "bdd {} {}", self.nodes.len(), self.edge_order.len());
        let name = |t: Target| match t {
            Target::Zero => 0,
            Target::One => 1,
            Target::Node(id) => id.0 as u64 + 2,
        };
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                i + 2,
                node.level,
                name(node.lo),
                name(node.hi)
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(level: u32, lo: Target, hi: Target) -> BddNode {
        BddNode {
            level,
            lo,
            hi,
            cost: 0,
        }
    }

    /// Root with a dead 0-branch subtree and a live 1-branch.
    fn sample() -> Bdd {
        use Target::*;
        Bdd::from_parts(
            vec![
                node(1, Node(NodeId(1)), Node(NodeId(2))),
                node(2, Node(NodeId(3)), Zero),
                node(2, One, Node(NodeId(3))),
                node(3, Zero, Zero),
            ],
            Node(NodeId(0)),
            vec![0, 1, 2],
        )
    }

    #[test]
    fn reduction_removes_dead_nodes() {
        let b = sample();
        assert_eq!(b.zero_zero_nodes(), 1);
        let r = b.reduce();
        assert_eq!(r.len(), 2);
        assert_eq!(r.zero_zero_nodes(), 0);
        assert!(r.reaches_one().iter().all(|&x| x));
        assert_eq!(r.count_paths(), b.count_paths());
        assert_eq!(r.reduce(), r);
    }

    #[test]
    fn dead_root_becomes_zero_sink() {
        let b = Bdd::from_parts(
            vec![node(1, Target::Zero, Target::Zero)],
            Target::Node(NodeId(0)),
            vec![0],
        );
        let r = b.reduce();
        assert!(r.is_empty());
        assert_eq!(r.root(), Target::Zero);
        assert_eq!(r.count_paths(), BigUint::default());
    }

    #[test]
    fn dump_format() {
        let r = sample().reduce();
        assert_eq!(r.dump(), "bdd 2 3\n2 1 0 3\n3 2 1 0\n");
    }
}
