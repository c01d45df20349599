//! Cross-module property tests on randomly generated small graphs.

use proptest::prelude::*;

use sling::graph::{Graph, LoadOptions, NodeId};
use sling::hp;
use sling::index::{build_index, SlingIndex, SlingParams};
use sling::oracle;
use sling::query;

/// Up to 40 edges over up to 12 nodes; node count inferred from the edges.
fn small_graph() -> impl Strategy<Value = Graph> {
    (
        2usize..=12,
        proptest::collection::vec((0u32..12, 0u32..12), 1..40),
    )
        .prop_map(|(n, edges)| {
            let edges: Vec<(NodeId, NodeId)> = edges
                .into_iter()
                .map(|(u, v)| (u % n as u32, v % n as u32))
                .collect();
            Graph::from_edges(n, &edges).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn edge_list_round_trip(
        raw in proptest::collection::vec((0u32..30, 0u32..30), 1..40),
        undirected in any::<bool>(),
    ) {
        let text: String = raw.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        let opts = LoadOptions { undirected, ..Default::default() };
        let g = Graph::load_edge_list(std::io::Cursor::new(text), &opts).unwrap();
        let mut buf = Vec::new();
        g.write_edge_list(&mut buf).unwrap();
        let reloaded = Graph::load_edge_list(
            std::io::Cursor::new(buf),
            &LoadOptions::default(),
        ).unwrap();
        prop_assert_eq!(g, reloaded);
    }

    #[test]
    fn adjacency_transpose_agrees(g in small_graph()) {
        let mut in_total = 0;
        for u in 0..g.node_count() as NodeId {
            in_total += g.in_degree(u);
            for &v in g.out_neighbors(u) {
                prop_assert!(g.in_neighbors(v).contains(&u));
            }
            for &v in g.in_neighbors(u) {
                prop_assert!(g.out_neighbors(v).contains(&u));
            }
            prop_assert!(g.in_neighbors(u).windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.out_neighbors(u).windows(2).all(|w| w[0] < w[1]));
        }
        prop_assert_eq!(in_total, g.edge_count());
    }

    #[test]
    fn two_hop_size_matches_brute_force(g in small_graph()) {
        let edges: Vec<(NodeId, NodeId)> = g.edges().collect();
        for v in 0..g.node_count() as NodeId {
            let direct: Vec<NodeId> =
                edges.iter().filter(|&&(_, b)| b == v).map(|&(a, _)| a).collect();
            let brute = direct.len()
                + direct
                    .iter()
                    .map(|&x| edges.iter().filter(|&&(_, b)| b == x).count())
                    .sum::<usize>();
            prop_assert_eq!(g.two_hop_in_size(v), brute);
        }
    }

    #[test]
    fn decomposition_matches_power_method(g in small_graph()) {
        let c = 0.6;
        let s = oracle::power_method(&g, c, 40).unwrap();
        let d = oracle::exact_correction(&g, c, &s);
        let table = oracle::exact_hitting_probabilities(&g, c, 25).unwrap();
        let power_tol = c.powi(41) / (1.0 - c);
        for i in 0..g.node_count() as NodeId {
            for j in 0..g.node_count() as NodeId {
                let (score, remainder) = oracle::eval_decomposition(&table, &d, i, j);
                prop_assert!(
                    (score - s.get(i, j)).abs() <= remainder + power_tol + 1e-9,
                    "({}, {}): {} vs {}", i, j, score, s.get(i, j)
                );
            }
        }
    }

    #[test]
    fn stored_hp_entries_underestimate(g in small_graph()) {
        let (c, theta) = (0.6, 0.01);
        let sets = hp::build_all_hp_sets(&g, c, theta, 1).unwrap();
        let max_step = sets
            .iter()
            .flat_map(|s| s.entries.iter().map(|e| e.step as usize))
            .max()
            .unwrap_or(0);
        let table = oracle::exact_hitting_probabilities(&g, c, max_step).unwrap();
        for set in &sets {
            for e in &set.entries {
                let exact = table.get(set.owner, e.step as usize, e.target);
                prop_assert!(e.value > theta);
                prop_assert!(e.value <= exact + 1e-12);
            }
        }
    }

    #[test]
    fn index_round_trip_and_query_symmetry(g in small_graph(), seed in 0u64..1000) {
        let params = SlingParams::derive(0.2, 0.05, 0.6, g.node_count()).unwrap();
        let ix = build_index(&g, &params, seed, 1).unwrap();
        let back = SlingIndex::from_bytes(&ix.to_bytes()).unwrap();
        prop_assert_eq!(&ix, &back);
        for i in 0..g.node_count() as NodeId {
            for j in 0..g.node_count() as NodeId {
                let a = query::single_pair(&ix, &g, i, j).unwrap().score;
                let b = query::single_pair(&ix, &g, j, i).unwrap().score;
                prop_assert_eq!(a.to_bits(), b.to_bits());
                prop_assert!(a >= 0.0 && a <= 1.0 + params.eps);
            }
        }
    }
}
