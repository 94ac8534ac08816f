//! Network topologies: random generators, edge-list ingestion and degree statistics.
//!
//! A [`Network`] is stored as compressed sparse rows over out-neighbors, with a
//! mirrored index for in-neighbors. Undirected inputs are stored with both
//! directions. Neighbor lists are sorted ascending, which fixes the order in
//! which cascades consume random draws.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;
use core::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    directed: bool,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
}

/// Edges discarded while building a [`Network`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Dropped {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl Network {
    /// Builds a network from ordered pairs, dropping self-loops and duplicates.
    ///
    /// For undirected networks `(u, v)` and `(v, u)` describe the same edge.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<(Self, Dropped)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut dropped = Dropped::default();
        let mut pairs = Vec::new();
        let mut offered = 0usize;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) outside [0, {n})")));
            }
            if u == v {
                dropped.self_loops += 1;
                continue;
            }
            offered += 1;
            if directed {
                pairs.push((u, v));
            } else {
                let (a, b) = if u < v { (u, v) } else { (v, u) };
                pairs.push((a, b));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        dropped.duplicates = offered - pairs.len();
        if !directed {
            let mirrored: Vec<_> = pairs.iter().map(|&(a, b)| (b, a)).collect();
            pairs.extend(mirrored);
            pairs.sort_unstable();
        }
        Ok((Self::from_sorted_unique(n, directed, &pairs), dropped))
    }

    fn from_sorted_unique(n: usize, directed: bool, pairs: &[(usize, usize)]) -> Self {
        let mut out_offsets = alloc::vec![0usize; n + 1];
        let mut in_offsets = alloc::vec![0usize; n + 1];
        for &(u, v) in pairs {
            out_offsets[u + 1] += 1;
            in_offsets[v + 1] += 1;
        }
        for i in 0..n {
            out_offsets[i + 1] += out_offsets[i];
            in_offsets[i + 1] += in_offsets[i];
        }
        let out_targets = pairs.iter().map(|&(_, v)| v).collect();
        // Pairs are sorted by (u, v); a stable pass keeps in-lists sorted by source.
        let mut cursor = in_offsets.clone();
        let mut in_sources = alloc::vec![0usize; pairs.len()];
        for &(u, v) in pairs {
            in_sources[cursor[v]] = u;
            cursor[v] += 1;
        }
        Network {
            n,
            directed,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        }
    }

    /// Network with `n` agents and no edges.
    pub fn empty(n: usize, directed: bool) -> Self {
        Self::from_sorted_unique(n, directed, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn out_neighbors(&self, u: usize) -> &[usize] {
        &self.out_targets[self.out_edge_range(u)]
    }

    pub fn in_neighbors(&self, u: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[u]..self.in_offsets[u + 1]]
    }

    /// Positions of `u`'s out-edges in the global edge order, used to index
    /// per-edge probability tables.
    pub fn out_edge_range(&self, u: usize) -> Range<usize> {
        self.out_offsets[u]..self.out_offsets[u + 1]
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_offsets[u + 1] - self.out_offsets[u]
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_offsets[u + 1] - self.in_offsets[u]
    }

    /// Number of stored ordered pairs (twice the edge count when undirected).
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    /// Number of edges, counting each undirected edge once.
    pub fn edge_count(&self) -> usize {
        if self.directed {
            self.arc_count()
        } else {
            self.arc_count() / 2
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// All stored ordered pairs in ascending order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    pub fn mean_out_degree(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.arc_count() as f64 / self.n as f64
        }
    }

    /// Writes the network as an edge list with dense indices. Undirected edges
    /// are written once, as `u v` with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (u, v) in self.arcs() {
            if self.directed || u < v {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out
    }
}

/// Undirected G(n, p) graph with `p = mean_degree / (n - 1)`.
pub fn generate_er(n: usize, mean_degree: f64, seed: u64) -> Result<Network> {
    if n < 2 {
        return Err(Error::param(format!("ER graph needs n >= 2, got {n}")));
    }
    let max = (n - 1) as f64;
    if !(0.0..=max).contains(&mean_degree) {
        return Err(Error::param(format!(
            "mean_degree {mean_degree} not in [0, {max}]"
        )));
    }
    let p = mean_degree / max;
    let mut rng = rng::seeded(seed);
    let mut pairs = Vec::new();
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                pairs.push((v, w));
            }
        }
    } else if p > 0.0 {
        // Geometric skipping over the lower triangle (Batagelj & Brandes).
        let log_q = libm::log(1.0 - p);
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            let skip = libm::floor(libm::log(1.0 - r) / log_q);
            w += 1 + skip as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                pairs.push((v, w as usize));
            }
        }
    }
    Network::from_edges(n, false, pairs).map(|(g, _)| g)
}

/// Undirected preferential-attachment graph grown from a ring of `n0` nodes.
///
/// Each of the `n - n0` later nodes attaches `k` distinct edges, choosing
/// targets proportionally to their current degree and redrawing collisions.
pub fn generate_ba(n: usize, n0: usize, k: usize, seed: u64) -> Result<Network> {
    if k < 1 || k > n0 || n0 >= n {
        return Err(Error::param(format!(
            "BA graph needs 1 <= k <= n0 < n, got n={n}, n0={n0}, k={k}"
        )));
    }
    let mut rng = rng::seeded(seed);
    let mut pairs = ring_core(n0);
    let mut pool: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut chosen = Vec::with_capacity(k);
    for u in n0..n {
        chosen.clear();
        while chosen.len() < k {
            let t = if pool.is_empty() {
                rng.random_range(0..u)
            } else {
                pool[rng.random_range(0..pool.len())]
            };
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            pairs.push((u, t));
            pool.push(u);
            pool.push(t);
        }
    }
    Network::from_edges(n, false, pairs).map(|(g, _)| g)
}

fn ring_core(n0: usize) -> Vec<(usize, usize)> {
    match n0 {
        0 | 1 => Vec::new(),
        2 => alloc::vec![(0, 1)],
        _ => (0..n0).map(|i| (i, (i + 1) % n0)).collect(),
    }
}

/// Number of leaves a star reaches: `round(rho * (n - 1))`.
pub fn star_reach(n: usize, rho: f64) -> usize {
    libm::round(rho * n.saturating_sub(1) as f64) as usize
}

/// Directed star: node 0 points at `round(rho * (n - 1))` uniformly chosen leaves.
pub fn generate_star(n: usize, rho: f64, seed: u64) -> Result<Network> {
    if n < 1 {
        return Err(Error::param("star needs at least one node"));
    }
    crate::error::check_prob("rho", rho)?;
    let reach = star_reach(n, rho);
    let mut rng = rng::seeded(seed);
    let mut leaves: Vec<usize> = rand::seq::index::sample(&mut rng, n - 1, reach)
        .into_iter()
        .map(|i| i + 1)
        .collect();
    leaves.sort_unstable();
    let pairs: Vec<_> = leaves.into_iter().map(|v| (0, v)).collect();
    Ok(Network::from_sorted_unique(n, true, &pairs))
}

/// A network read from text, with the original node labels.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub network: Network,
    /// `labels[i]` is the original label of dense index `i`.
    pub labels: Vec<i64>,
    pub dropped: Dropped,
}

/// Parses a whitespace-separated edge list.
///
/// Lines starting with `#` and blank lines are skipped; columns after the
/// first two are ignored. Labels are remapped to dense indices in ascending
/// label order.
pub fn parse_edge_list(text: &str, directed: bool) -> Result<EdgeList> {
    let mut raw = Vec::new();
    let mut labels = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let mut label = || -> Result<i64> {
            let tok = cols.next().ok_or_else(|| Error::Parse {
                line: i + 1,
                message: String::from("expected two node labels"),
            })?;
            tok.parse::<i64>().map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("invalid node label {tok:?}"),
            })
        };
        let u = label()?;
        let v = label()?;
        labels.insert(u, 0usize);
        labels.insert(v, 0usize);
        raw.push((u, v));
    }
    for (idx, slot) in labels.values_mut().enumerate() {
        *slot = idx;
    }
    let n = labels.len();
    let (network, dropped) =
        Network::from_edges(n, directed, raw.iter().map(|(u, v)| (labels[u], labels[v])))?;
    Ok(EdgeList {
        network,
        labels: labels.into_keys().collect(),
        dropped,
    })
}

/// Out-degree histogram and mean.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DegreeSummary {
    pub mean_out_degree: f64,
    pub histogram: BTreeMap<usize, usize>,
}

pub fn degree_stats(network: &Network) -> DegreeSummary {
    let mut histogram = BTreeMap::new();
    for u in 0..network.n() {
        *histogram.entry(network.out_degree(u)).or_insert(0) += 1;
    }
    DegreeSummary {
        mean_out_degree: network.mean_out_degree(),
        histogram,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_undirected_consistent(g: &Network) -> bool {
        g.arcs().all(|(u, v)| g.has_edge(v, u))
    }

    #[test]
    fn er_extremes() {
        let g = generate_er(10, 0.0, 1).unwrap();
        assert_eq!((g.n(), g.edge_count()), (10, 0));
        let g = generate_er(10, 9.0, 7).unwrap();
        assert_eq!(g.edge_count(), 45);
        assert!((0..10).all(|u| g.out_degree(u) == 9));
    }

    #[test]
    fn er_rejects_bad_degree() {
        assert!(matches!(generate_er(10, 9.5, 1), Err(Error::Parameter(_))));
        assert!(generate_er(10, -1.0, 1).is_err());
        assert!(generate_er(1, 0.0, 1).is_err());
    }

    #[test]
    fn er_is_seed_deterministic() {
        assert_eq!(
            generate_er(300, 8.0, 11).unwrap(),
            generate_er(300, 8.0, 11).unwrap()
        );
        assert_ne!(
            generate_er(300, 8.0, 11).unwrap(),
            generate_er(300, 8.0, 12).unwrap()
        );
    }

    #[test]
    fn er_edge_count_matches_binomial_mean() {
        // 40 graphs with n = 400, p = 0.02: E = 1596, sd = 39.5 per graph.
        let n = 400usize;
        let pairs = (n * (n - 1) / 2) as f64;
        let p = 8.0 / (n - 1) as f64;
        let reps = 40;
        let total: usize = (0..reps)
            .map(|s| generate_er(n, 8.0, s).unwrap().edge_count())
            .sum();
        let mean = total as f64 / reps as f64;
        let sd_of_mean = libm::sqrt(pairs * p * (1.0 - p) / reps as f64);
        assert!((mean - pairs * p).abs() < 3.0 * sd_of_mean, "mean {mean}");
    }

    #[test]
    fn ba_full_attachment() {
        let g = generate_ba(6, 5, 5, 1).unwrap();
        assert_eq!(g.out_neighbors(5), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn ba_edge_count_by_construction() {
        let g = generate_ba(500, 20, 10, 3).unwrap();
        assert_eq!(g.edge_count(), 20 + 480 * 10);
        assert!(is_undirected_consistent(&g));
    }

    #[test]
    fn ba_small_cores() {
        assert_eq!(generate_ba(10, 1, 1, 0).unwrap().edge_count(), 9);
        assert_eq!(generate_ba(10, 2, 2, 0).unwrap().edge_count(), 1 + 8 * 2);
        assert!(matches!(generate_ba(10, 3, 4, 0), Err(Error::Parameter(_))));
        assert!(generate_ba(5, 5, 1, 0).is_err());
    }

    #[test]
    fn star_reach_rounding() {
        let g = generate_star(11, 1.0, 0).unwrap();
        assert_eq!(g.out_neighbors(0), &[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(generate_star(11, 0.0, 0).unwrap().arc_count(), 0);
        let g = generate_star(5000, 0.5, 9).unwrap();
        assert_eq!(g.out_degree(0), 2500);
        assert_eq!(g.arc_count(), 2500);
        assert!(g.is_directed());
    }

    #[test]
    fn parse_basic_and_errors() {
        let el = parse_edge_list("0 1\n1 2\n", false).unwrap();
        assert_eq!((el.network.n(), el.network.edge_count()), (3, 2));

        let el = parse_edge_list("5 5\n5 6\n", false).unwrap();
        assert_eq!((el.network.n(), el.network.edge_count()), (2, 1));
        assert_eq!(el.dropped.self_loops, 1);
        assert_eq!(el.labels, [5, 6]);

        match parse_edge_list("a b", false) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edge_list("# c\n1 2\n3\n", true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parse_ignores_extra_columns_and_counts_duplicates() {
        let el = parse_edge_list("1 2 1400000 0.5\n2 1 1400001\n1 2\n", false).unwrap();
        assert_eq!(el.network.edge_count(), 1);
        assert_eq!(el.dropped.duplicates, 2);
        let el = parse_edge_list("1 2\n2 1\n", true).unwrap();
        assert_eq!(el.network.edge_count(), 2);
    }

    #[test]
    fn directedness_changes_mean_degree() {
        let text = "0 1\n1 2\n";
        let d = parse_edge_list(text, true).unwrap().network;
        let u = parse_edge_list(text, false).unwrap().network;
        assert!((d.mean_out_degree() - 2.0 / 3.0).abs() < 1e-15);
        assert!((u.mean_out_degree() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.in_neighbors(1), &[0]);
    }

    #[test]
    fn degree_stats_examples() {
        let k10 = generate_er(10, 9.0, 0).unwrap();
        let s = degree_stats(&k10);
        assert_eq!(s.mean_out_degree, 9.0);
        assert_eq!(s.histogram.get(&9), Some(&10));

        let s = degree_stats(&Network::empty(10, false));
        assert_eq!(s.histogram.get(&0), Some(&10));

        let s = degree_stats(&generate_star(11, 1.0, 0).unwrap());
        assert_eq!(s.histogram.get(&10), Some(&1));
        assert_eq!(s.histogram.get(&0), Some(&10));
    }

    #[test]
    fn out_of_range_edge() {
        assert!(Network::from_edges(3, true, [(0, 3)]).is_err());
    }
}
