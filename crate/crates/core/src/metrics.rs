//! Critical boundaries and batch statistics.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::cascade::CascadeResult;
use crate::error::{check_prob, Error, Result};
use crate::graph::Network;

/// Position relative to the diffusion boundary `<k> p_r (1 - p_a) = 1` and
/// the halting boundary `<k> p_r p_a p_h = 1`. A value of exactly 1 counts as
/// above.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Regime {
    AboveBoth,
    DiffusionOnly,
    HaltingOnly,
    BelowBoth,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::AboveBoth => "above_both",
            Regime::DiffusionOnly => "diffusion_only",
            Regime::HaltingOnly => "halting_only",
            Regime::BelowBoth => "below_both",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RegimeReport {
    pub diffusion_value: f64,
    pub halting_value: f64,
    pub regime: Regime,
}

pub fn classify_regime(mean_degree: f64, p_r: f64, p_a: f64, p_h: f64) -> Result<RegimeReport> {
    if !(mean_degree.is_finite() && mean_degree >= 0.0) {
        return Err(Error::param("mean degree must be finite and non-negative"));
    }
    check_prob("p_r", p_r)?;
    check_prob("p_a", p_a)?;
    check_prob("p_h", p_h)?;
    let diffusion_value = mean_degree * p_r * (1.0 - p_a);
    let halting_value = mean_degree * p_r * p_a * p_h;
    let regime = match (diffusion_value >= 1.0, halting_value >= 1.0) {
        (true, true) => Regime::AboveBoth,
        (true, false) => Regime::DiffusionOnly,
        (false, true) => Regime::HaltingOnly,
        (false, false) => Regime::BelowBoth,
    };
    Ok(RegimeReport {
        diffusion_value,
        halting_value,
        regime,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BatchSummary {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    /// Lower median over all runs.
    pub median_chain_length: usize,
    pub mean_applicants: f64,
    /// Mean chain length over successful runs; `None` without successes.
    pub mean_chain_depth: Option<f64>,
}

pub fn summarize<'a, I>(results: I) -> Result<BatchSummary>
where
    I: IntoIterator<Item = &'a CascadeResult>,
{
    let mut lengths = Vec::new();
    let mut successes = 0usize;
    let mut depth_sum = 0usize;
    let mut applicant_sum = 0usize;
    for r in results {
        lengths.push(r.chain_length);
        applicant_sum += r.applicants;
        if r.success {
            successes += 1;
            depth_sum += r.chain_length;
        }
    }
    let runs = lengths.len();
    if runs == 0 {
        return Err(Error::Empty);
    }
    lengths.sort_unstable();
    Ok(BatchSummary {
        runs,
        successes,
        success_rate: successes as f64 / runs as f64,
        median_chain_length: lengths[(runs - 1) / 2],
        mean_applicants: applicant_sum as f64 / runs as f64,
        mean_chain_depth: (successes > 0).then(|| depth_sum as f64 / successes as f64),
    })
}

/// Logarithmic degree bins per doubling of degree.
pub const DEFAULT_BINS_PER_OCTAVE: u32 = 2;

/// Half-open degree interval `[lo, hi)`. Degree 0 has its own bin `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DegreeBin {
    pub lo: usize,
    pub hi: usize,
}

impl DegreeBin {
    pub fn contains(&self, degree: usize) -> bool {
        (self.lo..self.hi).contains(&degree)
    }

    /// Geometric midpoint, used as the bin's representative degree.
    pub fn center(&self) -> f64 {
        libm::sqrt(self.lo.max(1) as f64 * (self.hi - 1).max(1) as f64)
    }
}

fn bin_edge(index: i64, per_octave: u32) -> usize {
    libm::ceil(libm::exp2(index as f64 / per_octave as f64) - 1e-9) as usize
}

/// Bin holding `degree` on a grid with `per_octave` bins per doubling.
pub fn degree_bin(degree: usize, per_octave: u32) -> DegreeBin {
    let per_octave = per_octave.max(1);
    if degree == 0 {
        return DegreeBin { lo: 0, hi: 1 };
    }
    let mut i = libm::floor(per_octave as f64 * libm::log2(degree as f64)) as i64;
    while bin_edge(i, per_octave) > degree {
        i -= 1;
    }
    while bin_edge(i + 1, per_octave) <= degree {
        i += 1;
    }
    DegreeBin {
        lo: bin_edge(i, per_octave),
        hi: bin_edge(i + 1, per_octave),
    }
}

/// Summaries per degree bin for `(degree, result)` pairs. Empty bins are absent.
pub fn bin_by_degree<'a, I>(items: I, per_octave: u32) -> BTreeMap<DegreeBin, BatchSummary>
where
    I: IntoIterator<Item = (usize, &'a CascadeResult)>,
{
    let mut groups: BTreeMap<DegreeBin, Vec<&CascadeResult>> = BTreeMap::new();
    for (degree, r) in items {
        groups
            .entry(degree_bin(degree, per_octave))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|(bin, rs)| (bin, summarize(rs).expect("groups are nonempty")))
        .collect()
}

/// Summaries per out-degree bin of each run's seed node.
pub fn bin_by_seed_degree(
    results: &[CascadeResult],
    network: &Network,
) -> BTreeMap<DegreeBin, BatchSummary> {
    bin_by_degree(
        results.iter().map(|r| (network.out_degree(r.seed_node), r)),
        DEFAULT_BINS_PER_OCTAVE,
    )
}

/// Average ranks, ties sharing the mean of their positions.
fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = alloc::vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation; `None` for fewer than two points or a constant input.
pub fn spearman(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some(sxy / libm::sqrt(sxx * syy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn run(success: bool, chain_length: usize, applicants: usize) -> CascadeResult {
        CascadeResult {
            success,
            chain_length,
            applicants,
            halters: if success { vec![1] } else { vec![] },
            steps: 1,
            seed_node: 0,
            reached: 1,
            chain: vec![],
            trace: None,
        }
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(50.0, 0.5, 0.5, 0.5).unwrap();
        assert_eq!((r.diffusion_value, r.halting_value), (12.5, 6.25));
        assert_eq!(r.regime, Regime::AboveBoth);

        let r = classify_regime(50.0, 0.01, 0.1, 0.5).unwrap();
        assert!((r.diffusion_value - 0.45).abs() < 1e-12);
        assert!((r.halting_value - 0.025).abs() < 1e-12);
        assert_eq!(r.regime, Regime::BelowBoth);

        let r = classify_regime(50.0, 0.0, 0.3, 0.3).unwrap();
        assert_eq!(
            (r.diffusion_value, r.halting_value, r.regime),
            (0.0, 0.0, Regime::BelowBoth)
        );
    }

    #[test]
    fn boundary_counts_as_above() {
        assert_eq!(
            classify_regime(4.0, 0.5, 0.5, 1.0).unwrap().regime,
            Regime::AboveBoth
        );
        assert_eq!(
            classify_regime(4.0, 0.5, 1.0, 0.5).unwrap().regime,
            Regime::HaltingOnly
        );
        assert_eq!(
            classify_regime(4.0, 0.5, 0.5, 0.5).unwrap().regime,
            Regime::DiffusionOnly
        );
        assert!(classify_regime(-1.0, 0.5, 0.5, 0.5).is_err());
        assert!(classify_regime(1.0, 0.5, 1.5, 0.5).is_err());
    }

    #[test]
    fn summary_examples() {
        let all_fail: Vec<_> = (0..100).map(|_| run(false, 1, 0)).collect();
        let s = summarize(&all_fail).unwrap();
        assert_eq!(
            (s.success_rate, s.median_chain_length, s.mean_applicants),
            (0.0, 1, 0.0)
        );
        assert_eq!(s.mean_chain_depth, None);

        let s = summarize(&[run(true, 2, 1), run(true, 2, 3), run(true, 3, 2)]).unwrap();
        assert_eq!(s.median_chain_length, 2);
        assert_eq!(s.mean_applicants, 2.0);
        assert!((s.mean_chain_depth.unwrap() - 7.0 / 3.0).abs() < 1e-15);

        let s = summarize(&[run(false, 4, 0), run(true, 2, 1)]).unwrap();
        assert_eq!(s.median_chain_length, 2);
        assert_eq!(s.success_rate, 0.5);
        assert_eq!(s.mean_chain_depth, Some(2.0));

        assert_eq!(summarize(&[]), Err(Error::Empty));
    }

    #[test]
    fn degree_bins_partition_degrees() {
        for per_octave in [1, 2, 4] {
            let mut prev = degree_bin(0, per_octave);
            assert_eq!(prev, DegreeBin { lo: 0, hi: 1 });
            for d in 1..3000 {
                let b = degree_bin(d, per_octave);
                assert!(b.contains(d), "d={d} bin={b:?}");
                assert!(b >= prev);
                prev = b;
            }
        }
        assert_eq!(degree_bin(64, 1), DegreeBin { lo: 64, hi: 128 });
        assert_eq!(degree_bin(63, 1), DegreeBin { lo: 32, hi: 64 });
    }

    #[test]
    fn same_degree_single_bin() {
        let rs: Vec<_> = (0..10).map(|i| run(i % 2 == 0, 2, 1)).collect();
        let bins = bin_by_degree(rs.iter().map(|r| (50, r)), 2);
        assert_eq!(bins.len(), 1);
        assert_eq!(bins.values().next().unwrap().runs, 10);
    }

    #[test]
    fn spearman_basics() {
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 25.0]), Some(1.0));
        assert_eq!(spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]), Some(-1.0));
        assert_eq!(spearman(&[1.0, 2.0], &[1.0, 1.0]), None);
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert!(r > 0.9 && r < 1.0);
    }
}
