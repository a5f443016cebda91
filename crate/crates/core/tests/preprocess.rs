mod common;

use proptest::prelude::*;

use common::{instance_with_series_vertex, random_instance, SMALL};
use steiner_bdd::oracle::brute_force_minimal_steiner;
use steiner_bdd::pipeline::{run, RunConfig, Theta};
use steiner_bdd::seed::{select_seeds, SeedConfig};
use steiner_bdd::{simplify, validate_tree, UNBOUNDED};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn simplify_is_idempotent(seed in any::<u64>()) {
        let g = random_instance(seed, SMALL);
        let (s, _) = simplify(&g);
        let (s2, map2) = simplify(&s);
        prop_assert!(map2.is_identity());
        prop_assert_eq!(s2, s.clone());
        for v in s.vertices() {
            prop_assert!(s.is_terminal(v) || s.degree(v) != 2);
        }
    }

    #[test]
    fn simplification_is_lossless(seed in any::<u64>()) {
        let g = instance_with_series_vertex(seed, SMALL);
        let mut direct = RunConfig::exact(1_000_000);
        direct.theta = Theta::Unbounded;
        let mut simplified = direct.clone();
        simplified.simplify = true;
        let a = run(&g, &direct).unwrap().trees;
        let b = run(&g, &simplified).unwrap().trees;
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, brute_force_minimal_steiner(&g, UNBOUNDED).unwrap().trees);
    }

    #[test]
    fn seeds_are_trees_inside_the_union(seed in any::<u64>(), rng_seed in any::<u64>(), n in 1usize..5) {
        let g = random_instance(seed, SMALL);
        let cfg = SeedConfig { num_seeds: n, perturb_fraction: 0.2, rng_seed, ..Default::default() };
        let sel = select_seeds(&g, &cfg).unwrap();
        prop_assert_eq!(sel.seeds.len() + sel.shortfall, n);
        for t in &sel.seeds {
            prop_assert!(validate_tree(t, &g));
            for e in t.edges() {
                prop_assert!(sel.subgraph.parent_edges.contains(e));
            }
        }
        let again = select_seeds(&g, &cfg).unwrap();
        prop_assert_eq!(again.seeds, sel.seeds);
    }
}
