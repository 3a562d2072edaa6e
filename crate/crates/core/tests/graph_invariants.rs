use oddwalk::graph::{
    binomial, build_odd_graph, closed_form_intersection, distance_via_intersection, intersection_numbers, stratify,
    K_MAX,
};

#[test]
fn counts_and_regularity_up_to_k_max() {
    for k in 2..=K_MAX {
        let g = build_odd_graph(k).unwrap();
        let n = binomial(2 * k as u64 - 1, k as u64 - 1) as usize;
        assert_eq!(g.vertex_count(), n, "k = {k}");
        assert_eq!(g.edge_count(), n * k / 2);
        assert!(g.vertices().windows(2).all(|w| w[0] < w[1]));
        for v in 0..n {
            assert_eq!(g.mask(v).count_ones() as usize, k - 1);
            assert!(g.mask(v) >> (2 * k - 1) == 0);
            assert_eq!(g.neighbors(v).len(), k);
        }
    }
}

#[test]
fn strata_match_closed_form_up_to_k_max() {
    for k in 2..=K_MAX {
        let g = build_odd_graph(k).unwrap();
        let strat = stratify(&g, g.default_origin()).unwrap();
        assert_eq!(strat.diameter(), k - 1);
        let computed = intersection_numbers(&g, &strat).unwrap();
        let closed = closed_form_intersection(k).unwrap();
        assert_eq!(computed.a, closed.a, "k = {k}");
        assert_eq!(computed.b, closed.b);
        assert_eq!(computed.c, closed.c);
        assert_eq!(computed.shell_sizes, closed.shell_sizes);
        let sizes: Vec<String> = strat.sizes().iter().map(|s| s.to_string()).collect();
        let expected: Vec<String> = closed.shell_sizes.iter().map(|s| s.to_string()).collect();
        assert_eq!(sizes, expected);
    }
}

#[test]
fn bfs_agrees_with_intersection_rule() {
    for k in 2..=6 {
        let g = build_odd_graph(k).unwrap();
        for u in (0..g.vertex_count()).step_by(7) {
            let bfs = g.distances_from(u).unwrap();
            for (v, &d) in bfs.iter().enumerate() {
                if v != u {
                    assert_eq!(distance_via_intersection(&g, u, v).unwrap(), d, "k = {k}, {u} -> {v}");
                }
            }
        }
    }
}
