use std::collections::VecDeque;

use ihc_core::graph::{
    degree_stats, generate_ba, generate_er, generate_star, parse_edge_list, Network,
};
use proptest::prelude::*;

fn max_degree(g: &Network) -> usize {
    (0..g.n()).map(|u| g.out_degree(u)).max().unwrap_or(0)
}

fn is_connected(g: &Network) -> bool {
    let mut seen = vec![false; g.n()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in g.out_neighbors(u) {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == g.n()
}

#[test]
fn er_mean_degree_concentrates() {
    for seed in 0..20 {
        let g = generate_er(5000, 50.0, seed).unwrap();
        let mean = degree_stats(&g).mean_out_degree;
        assert!((mean - 50.0).abs() <= 1.0, "seed {seed}: {mean}");
    }
}

#[test]
fn ba_tail_is_heavier_than_er() {
    for seed in 0..20 {
        let ba = generate_ba(5000, 50, 50, seed).unwrap();
        let mean = ba.mean_out_degree();
        assert_eq!(ba.edge_count(), 50 + 4950 * 50);
        assert!(max_degree(&ba) as f64 > 3.0 * mean, "seed {seed}");
        let er = generate_er(5000, mean, seed).unwrap();
        assert!(max_degree(&ba) > max_degree(&er));
    }
}

#[test]
fn star_is_a_star() {
    let g = generate_star(5000, 0.5, 3).unwrap();
    let s = degree_stats(&g);
    assert_eq!(s.histogram[&2500], 1);
    assert_eq!(s.histogram[&0], 4999);
    assert!(g
        .out_neighbors(0)
        .iter()
        .all(|&v| v != 0 && g.in_neighbors(v) == [0]));
}

fn check_invariants(g: &Network) -> Result<(), TestCaseError> {
    for u in 0..g.n() {
        let out = g.out_neighbors(u);
        prop_assert!(out.windows(2).all(|w| w[0] < w[1]), "sorted, no duplicates");
        prop_assert!(!out.contains(&u), "no self-loops");
        prop_assert!(out.iter().all(|&v| v < g.n()));
        if !g.is_directed() {
            prop_assert!(out.iter().all(|&v| g.has_edge(v, u)));
        }
    }
    let s = degree_stats(g);
    prop_assert_eq!(s.histogram.values().sum::<usize>(), g.n());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generators_are_seed_pure(n in 3usize..200, k in 0.0f64..10.0, seed in any::<u64>()) {
        let k = k.min((n - 1) as f64);
        let a = generate_er(n, k, seed).unwrap();
        prop_assert_eq!(&a, &generate_er(n, k, seed).unwrap());
        check_invariants(&a)?;
        let n0 = (n / 4).max(1);
        let b = generate_ba(n, n0, n0.min(3), seed).unwrap();
        prop_assert_eq!(&b, &generate_ba(n, n0, n0.min(3), seed).unwrap());
        check_invariants(&b)?;
        let s = generate_star(n, 0.3, seed).unwrap();
        prop_assert_eq!(&s, &generate_star(n, 0.3, seed).unwrap());
        check_invariants(&s)?;
    }

    #[test]
    fn ba_with_connected_core_is_connected(n in 10usize..300, n0 in 3usize..10, seed in any::<u64>()) {
        let g = generate_ba(n, n0, 2, seed).unwrap();
        prop_assert!(is_connected(&g));
    }

    #[test]
    fn edge_list_round_trip(edges in prop::collection::vec((0i64..40, 0i64..40), 1..120), directed in any::<bool>()) {
        let text: String = edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect();
        let Ok(first) = parse_edge_list(&text, directed) else { return Ok(()) };
        check_invariants(&first.network)?;
        // Isolated labels (self-loop only) cannot survive an edge list.
        prop_assume!((0..first.network.n()).all(|u| first.network.out_degree(u) + first.network.in_degree(u) > 0));
        let dense = first.network.to_edge_list();
        let second = parse_edge_list(&dense, directed).unwrap();
        prop_assert_eq!(&second.network, &first.network);
        prop_assert_eq!(second.network.to_edge_list(), dense);
    }
}
