use graph_purify::{Color, Graph, StandardGraph};
use proptest::prelude::*;

/// Random bipartite edge list on `n` vertices.
fn bipartite() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (2usize..12)
        .prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n), prop::collection::vec(any::<bool>(), n * n)))
        .prop_map(|(n, side, pick)| {
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if side[u] != side[v] && pick[u * n + v] {
                        edges.push((u, v));
                    }
                }
            }
            (n, edges)
        })
}

proptest! {
    #[test]
    fn every_edge_crosses_the_coloring((n, edges) in bipartite()) {
        let g = Graph::new(n, &edges).unwrap();
        for &(u, v) in g.edges() {
            prop_assert_ne!(g.color(u), g.color(v));
        }
        prop_assert_eq!(g.a_mask() | g.b_mask(), (1u64 << n) - 1);
        prop_assert_eq!(g.a_mask() & g.b_mask(), 0);
    }

    #[test]
    fn relabeling_permutes_neighbor_masks(
        (n, edges, perm) in bipartite().prop_flat_map(|(n, e)| (Just(n), Just(e), Just((0..n).collect::<Vec<_>>()).prop_shuffle()))
    ) {
        let g = Graph::new(n, &edges).unwrap();
        let relabeled: Vec<_> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        let h = Graph::new(n, &relabeled).unwrap();
        for v in 0..n {
            let moved = graph_purify::graph::bits(g.neighbor_mask(v)).fold(0u64, |m, w| m | 1 << perm[w]);
            prop_assert_eq!(h.neighbor_mask(perm[v]), moved);
        }
    }

    #[test]
    fn text_format_round_trips((n, edges) in bipartite()) {
        let g = Graph::new(n, &edges).unwrap();
        let back = Graph::from_text(&g.to_text()).unwrap();
        prop_assert_eq!(back.edges(), g.edges());
        prop_assert_eq!(back.a_mask(), g.a_mask());
    }
}

#[test]
fn standard_edge_counts_and_degrees() {
    for n in 2..=16 {
        let path = Graph::standard(StandardGraph::LinearCluster(n)).unwrap();
        assert_eq!(path.edges().len(), n - 1);
        assert_eq!(path.max_degree(), if n == 2 { 1 } else { 2 });
        let ghz = Graph::standard(StandardGraph::Ghz(n)).unwrap();
        assert_eq!(ghz.edges().len(), n - 1);
        assert_eq!(ghz.max_degree(), n - 1);
        assert_eq!(ghz.n_a(), 1);
        assert_eq!(ghz.color(0), Color::A);
    }
    for n in (4..=16).step_by(2) {
        let ring = Graph::standard(StandardGraph::ClosedCluster(n)).unwrap();
        assert_eq!(ring.edges().len(), n);
        assert_eq!((ring.n_a(), ring.n_b()), (n / 2, n / 2));
    }
}
