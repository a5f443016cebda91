mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use common::{random_instance, SMALL};
use steiner_bdd::frontier::construct_with;
use steiner_bdd::traverse::{enumerate, EnumerateOptions};
use steiner_bdd::{
    construct, Bdd, ConstructOptions, EdgeOrder, Graph, StartRule, Target, UNBOUNDED,
};

fn build(g: &Graph, theta: u64, merge: bool) -> Bdd {
    let order = EdgeOrder::bfs(g, StartRule::MinDegreeTerminal);
    let opts = ConstructOptions {
        theta,
        merge,
        ..Default::default()
    };
    construct(g, &order, opts).unwrap().0
}

/// Every root-to-1-sink path as an edge set.
fn paths(b: &Bdd) -> BTreeSet<Vec<usize>> {
    fn walk(b: &Bdd, t: Target, acc: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
        match t {
            Target::Zero => {}
            Target::One => {
                let mut e = acc.clone();
                e.sort();
                out.insert(e);
            }
            Target::Node(id) => {
                let node = b.node(id);
                walk(b, node.lo, acc, out);
                acc.push(b.edge_at_level(node.level));
                walk(b, node.hi, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(b, b.root(), &mut Vec::new(), &mut out);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduction_invariants(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let raw = build(&g, UNBOUNDED, true);
        let r = raw.reduce();
        prop_assert_eq!(r.zero_zero_nodes(), 0);
        prop_assert!(r.reaches_one().iter().all(|&x| x));
        prop_assert_eq!(r.count_paths(), raw.count_paths());
        prop_assert_eq!(paths(&r), paths(&raw));
        prop_assert!(r.len() <= raw.len());
        prop_assert_eq!(r.reduce(), r);
    }

    #[test]
    fn merging_preserves_the_tree_set(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let merged = build(&g, UNBOUNDED, true);
        let plain = build(&g, UNBOUNDED, false);
        prop_assert_eq!(paths(&merged), paths(&plain));
        prop_assert!(merged.len() <= plain.len());
    }

    #[test]
    fn node_cost_is_cheapest_path_to_node(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let b = build(&g, UNBOUNDED, true);
        let mut best = vec![u64::MAX; b.len()];
        if let Target::Node(root) = b.root() {
            best[root.index()] = 0;
        }
        for (i, node) in b.nodes().iter().enumerate() {
            let c = g.edge(b.edge_at_level(node.level)).cost;
            if best[i] == u64::MAX {
                continue;
            }
            prop_assert_eq!(node.cost, best[i]);
            for (t, add) in [(node.lo, 0), (node.hi, c)] {
                if let Target::Node(id) = t {
                    best[id.index()] = best[id.index()].min(best[i] + add);
                }
            }
        }
    }

    #[test]
    fn callback_sees_every_node(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let order = EdgeOrder::bfs(&g, StartRule::MinDegreeTerminal);
        let mut seen = Vec::new();
        let (b, stats) = construct_with(&g, &order, ConstructOptions::default(), |id, level, info| {
            seen.push((id, level, info.cost));
        }).unwrap();
        prop_assert_eq!(seen.len(), b.len());
        for (id, level, cost) in seen {
            prop_assert_eq!(b.node(id).level as usize, level);
            prop_assert!(b.node(id).cost <= cost);
        }
        prop_assert_eq!(stats.layer_sizes.iter().sum::<usize>(), b.len());
    }

    #[test]
    fn theta_bounded_bdd_keeps_cheap_trees(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let full = paths(&build(&g, UNBOUNDED, true));
        let min = full.iter().map(|e| g.total_cost(e)).min().unwrap();
        let theta = min + min / 5;
        let bounded = paths(&build(&g, theta, true));
        for e in full.iter().filter(|e| g.total_cost(e) <= theta) {
            prop_assert!(bounded.contains(e));
        }
        prop_assert!(bounded.is_subset(&full));
    }

    #[test]
    fn live_entries_stay_within_contract(seed in any::<u64>(), k in 1usize..20) {
        let g = random_instance(seed, SMALL);
        let b = build(&g, UNBOUNDED, true).reduce();
        let (_, stats) = enumerate(&b, &g, EnumerateOptions::new(k, UNBOUNDED)).unwrap();
        prop_assert!(stats.peak_live_entries <= 2 * k * stats.max_layer_width.max(1));
    }
}
