//! Parameter sweeps behind each subcommand.
//!
//! Replication `i` of a sweep draws everything from stream `i` of the master
//! seed (offset per topology or specificity), then runs every grid cell on
//! the same network and seed agent. Cells are therefore compared under common
//! random numbers, and rows come out in grid order however the work is
//! scheduled.

use ihc_core::cascade::{run_replication, CascadeResult, IhcParams, SeedRule};
use ihc_core::compute_payouts;
use ihc_core::graph::{degree_stats, generate_ba, generate_er, EdgeList, Network};
use ihc_core::metrics::{
    bin_by_degree, classify_regime, summarize, BatchSummary, DEFAULT_BINS_PER_OCTAVE,
};
use ihc_core::oracle::{
    analyze, oracle_success_probability, simulate_oracle, HirableRange, OracleSpec,
};
use ihc_core::rng::{self, SimRng};
use ihc_core::skills::{bind_params, sample_skill_world_with};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Experiment, Settings};
use crate::error::Result;
use crate::io::{emit, load_edge_list};

/// Stream for replication `i` of sub-sweep `tag`.
fn stream(tag: u64, i: u64) -> u64 {
    (tag << 32) | i
}

fn replication_rng(seed: u64, tag: u64, i: u64) -> SimRng {
    rng::replication(seed, stream(tag, i))
}

/// `(p_r, p_a, p_h)`.
pub type Cell = (f64, f64, f64);

fn grid3(a: &[f64], b: &[f64], c: &[f64]) -> Vec<Cell> {
    let mut out = Vec::with_capacity(a.len() * b.len() * c.len());
    for &x in a {
        for &y in b {
            for &z in c {
                out.push((x, y, z));
            }
        }
    }
    out
}

/// One cascade from a uniformly drawn seed agent, reproducible from `seed`.
fn cascade_from(
    network: &Network,
    params: &IhcParams,
    seed: u64,
) -> ihc_core::Result<CascadeResult> {
    run_replication(network, params, &SeedRule::UniformSingle, seed, 0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HeatmapRow {
    pub p_r: f64,
    pub p_a: f64,
    pub p_h: f64,
    pub n: usize,
    pub mean_degree: f64,
    pub reps: usize,
    pub seed: u64,
    pub diffusion_value: f64,
    pub halting_value: f64,
    pub regime: &'static str,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_chain_length: usize,
    pub mean_applicants: f64,
    /// Mean chain length over successful runs.
    pub mean_chain_depth: Option<f64>,
}

/// Per-cell results of a heatmap sweep, cells in `(p_r, p_a, p_h)` order.
pub fn heatmap_runs(s: &Settings) -> Result<Vec<(Cell, Vec<CascadeResult>)>> {
    let seed = s.master_seed()?;
    let cells = grid3(&s.p_r, &s.p_a, &s.p_h);
    let per_rep: Vec<Vec<CascadeResult>> = (0..s.reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(seed, 0, i);
            let g = generate_er(s.n, s.mean_degree, rng.next_u64())?;
            let cascade_seed = rng.next_u64();
            cells
                .iter()
                .map(|&(p_r, p_a, p_h)| {
                    cascade_from(&g, &IhcParams::homogeneous(p_r, p_a, p_h), cascade_seed)
                })
                .collect()
        })
        .collect::<ihc_core::Result<_>>()?;
    Ok(transpose(cells, per_rep))
}

fn transpose<K, T>(keys: Vec<K>, per_rep: Vec<Vec<T>>) -> Vec<(K, Vec<T>)> {
    let mut out: Vec<(K, Vec<T>)> = keys
        .into_iter()
        .map(|k| (k, Vec::with_capacity(per_rep.len())))
        .collect();
    for rep in per_rep {
        for (slot, r) in out.iter_mut().zip(rep) {
            slot.1.push(r);
        }
    }
    out
}

pub fn heatmap(s: &Settings) -> Result<Vec<HeatmapRow>> {
    let seed = s.master_seed()?;
    heatmap_runs(s)?
        .into_iter()
        .map(|((p_r, p_a, p_h), rs)| {
            let regime = classify_regime(s.mean_degree, p_r, p_a, p_h)?;
            let b = summarize(&rs)?;
            Ok(HeatmapRow {
                p_r,
                p_a,
                p_h,
                n: s.n,
                mean_degree: s.mean_degree,
                reps: s.reps,
                seed,
                diffusion_value: regime.diffusion_value,
                halting_value: regime.halting_value,
                regime: regime.regime.as_str(),
                runs: b.runs,
                successes: b.successes,
                success_rate: b.success_rate,
                median_chain_length: b.median_chain_length,
                mean_applicants: b.mean_applicants,
                mean_chain_depth: b.mean_chain_depth,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Er = 0,
    Ba = 1,
}

/// Results of one topology and parameter cell, each paired with the degree of
/// its seed agent.
#[derive(Debug, Clone)]
pub struct TopologyRuns {
    pub topology: Topology,
    pub p_r: f64,
    pub p_a: f64,
    pub p_h: f64,
    pub runs: Vec<(usize, CascadeResult)>,
}

impl TopologyRuns {
    pub fn by_seed_degree(
        &self,
    ) -> std::collections::BTreeMap<ihc_core::metrics::DegreeBin, BatchSummary> {
        bin_by_degree(
            self.runs.iter().map(|(d, r)| (*d, r)),
            DEFAULT_BINS_PER_OCTAVE,
        )
    }
}

pub fn ba_vs_er_runs(s: &Settings) -> Result<Vec<TopologyRuns>> {
    let mut out = topology_runs(s, Topology::Er)?;
    out.extend(topology_runs(s, Topology::Ba)?);
    Ok(out)
}

/// One topology's share of a [`ba_vs_er_runs`] sweep.
pub fn topology_runs(s: &Settings, topology: Topology) -> Result<Vec<TopologyRuns>> {
    let seed = s.master_seed()?;
    let cells = grid3(&s.p_r, &s.p_a, &s.p_h);
    let tag = topology as u64;
    let per_rep: Vec<Vec<(usize, CascadeResult)>> = (0..s.reps as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = replication_rng(seed, tag, i);
            let g = match topology {
                Topology::Er => generate_er(s.n, s.mean_degree, rng.next_u64())?,
                Topology::Ba => generate_ba(s.n, s.ba_n0, s.ba_k, rng.next_u64())?,
            };
            let cascade_seed = rng.next_u64();
            cells
                .iter()
                .map(|&(p_r, p_a, p_h)| {
                    let r = cascade_from(&g, &IhcParams::homogeneous(p_r, p_a, p_h), cascade_seed)?;
                    Ok((g.out_degree(r.seed_node), r))
                })
                .collect()
        })
        .collect::<ihc_core::Result<_>>()?;
    Ok(transpose(cells, per_rep)
        .into_iter()
        .map(|((p_r, p_a, p_h), runs)| TopologyRuns {
            topology,
            p_r,
            p_a,
            p_h,
            runs,
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopologyRow {
    pub topology: Topology,
    pub p_r: f64,
    pub p_a: f64,
    pub p_h: f64,
    pub n: usize,
    pub mean_degree: f64,
    pub ba_n0: usize,
    pub ba_k: usize,
    pub reps: usize,
    pub seed: u64,
    /// Seed-degree bin `[k0_lo, k0_hi)`; both empty on the row covering every seed.
    pub k0_lo: Option<usize>,
    pub k0_hi: Option<usize>,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_chain_length: usize,
    pub mean_applicants: f64,
    /// Mean chain length over successful runs.
    pub mean_chain_depth: Option<f64>,
}

pub fn ba_vs_er(s: &Settings) -> Result<Vec<TopologyRow>> {
    let seed = s.master_seed()?;
    let mut rows = Vec::new();
    for t in ba_vs_er_runs(s)? {
        let row = |bin: Option<(usize, usize)>, b: BatchSummary| TopologyRow {
            topology: t.topology,
            p_r: t.p_r,
            p_a: t.p_a,
            p_h: t.p_h,
            n: s.n,
            mean_degree: s.mean_degree,
            ba_n0: s.ba_n0,
            ba_k: s.ba_k,
            reps: s.reps,
            seed,
            k0_lo: bin.map(|b| b.0),
            k0_hi: bin.map(|b| b.1),
            runs: b.runs,
            successes: b.successes,
            success_rate: b.success_rate,
            median_chain_length: b.median_chain_length,
            mean_applicants: b.mean_applicants,
            mean_chain_depth: b.mean_chain_depth,
        };
        rows.push(row(None, summarize(t.runs.iter().map(|(_, r)| r))?));
        for (bin, summary) in t.by_seed_degree() {
            rows.push(row(Some((bin.lo, bin.hi)), summary));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum System {
    Ihc,
    Oracle,
}

#[derive(Debug, Clone)]
pub struct SystemRuns {
    pub system: System,
    pub p_r: f64,
    pub nu: usize,
    pub results: Vec<CascadeResult>,
}

/// Runs both systems on a shared skill world per replication. The IHC runs
/// on `network`, or on a fresh ER graph per replication when it is `None`.
fn paired_runs(s: &Settings, network: Option<&Network>) -> Result<Vec<SystemRuns>> {
    let seed = s.master_seed()?;
    let n = network.map_or(s.n, |g| g.n());
    let mut out = Vec::new();
    for &nu in &s.nu {
        let per_rep: Vec<Vec<(CascadeResult, CascadeResult)>> = (0..s.reps as u64)
            .into_par_iter()
            .map(|i| {
                let mut rng = replication_rng(seed, nu as u64, i);
                let world = sample_skill_world_with(n, s.lambda, nu, &mut rng)?;
                let fresh;
                let g = match network {
                    Some(g) => g,
                    None => {
                        fresh = generate_er(n, s.mean_degree, rng.next_u64())?;
                        &fresh
                    }
                };
                let (ihc_seed, oracle_seed) = (rng.next_u64(), rng.next_u64());
                s.p_r
                    .iter()
                    .map(|&p_r| {
                        let ihc = cascade_from(g, &bind_params(&world, p_r)?, ihc_seed)?;
                        let oracle = simulate_oracle(&world, s.rho, p_r, oracle_seed)?;
                        Ok((ihc, oracle))
                    })
                    .collect()
            })
            .collect::<ihc_core::Result<_>>()?;
        for (p_r, pairs) in transpose(s.p_r.clone(), per_rep) {
            let (ihc, oracle): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            out.push(SystemRuns {
                system: System::Ihc,
                p_r,
                nu,
                results: ihc,
            });
            out.push(SystemRuns {
                system: System::Oracle,
                p_r,
                nu,
                results: oracle,
            });
        }
    }
    Ok(out)
}

pub fn ihc_vs_oracle_runs(s: &Settings) -> Result<Vec<SystemRuns>> {
    paired_runs(s, None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemRow {
    pub system: System,
    pub p_r: f64,
    pub nu: usize,
    pub lambda: f64,
    pub n: usize,
    pub mean_degree: f64,
    pub rho: f64,
    pub reps: usize,
    pub seed: u64,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_chain_length: usize,
    pub mean_applicants: f64,
    /// Mean chain length over successful runs.
    pub mean_chain_depth: Option<f64>,
    /// Closed-form Oracle success probability for the same `(N, rho, p_r, lambda, nu)`.
    pub analytic_oracle: f64,
}

pub fn ihc_vs_oracle(s: &Settings) -> Result<Vec<SystemRow>> {
    let seed = s.master_seed()?;
    ihc_vs_oracle_runs(s)?
        .into_iter()
        .map(|r| {
            let spec = OracleSpec {
                n: s.n,
                rho: s.rho,
                p_r: r.p_r,
                lambda: s.lambda,
                nu: r.nu,
            };
            let b = summarize(&r.results)?;
            Ok(SystemRow {
                system: r.system,
                p_r: r.p_r,
                nu: r.nu,
                lambda: s.lambda,
                n: s.n,
                mean_degree: s.mean_degree,
                rho: s.rho,
                reps: s.reps,
                seed,
                runs: b.runs,
                successes: b.successes,
                success_rate: b.success_rate,
                median_chain_length: b.median_chain_length,
                mean_applicants: b.mean_applicants,
                mean_chain_depth: b.mean_chain_depth,
                analytic_oracle: oracle_success_probability(&spec, s.mass_threshold)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticRow {
    pub n: usize,
    pub rho: f64,
    pub lambda: f64,
    pub nu: usize,
    pub p_r: f64,
    pub mass_threshold: f64,
    pub p_lambda: f64,
    pub k_max: usize,
    pub l_min: usize,
    pub l_max: usize,
    pub draws: usize,
    pub window_mass: f64,
    pub probability: f64,
}

pub fn oracle_analytic(s: &Settings) -> Result<Vec<AnalyticRow>> {
    let mut rows = Vec::new();
    for &nu in &s.nu {
        for &p_r in &s.p_r {
            let spec = OracleSpec {
                n: s.n,
                rho: s.rho,
                p_r,
                lambda: s.lambda,
                nu,
            };
            let a = analyze(&spec, s.mass_threshold, HirableRange::Truncated)?;
            rows.push(AnalyticRow {
                n: s.n,
                rho: s.rho,
                lambda: s.lambda,
                nu,
                p_r,
                mass_threshold: s.mass_threshold,
                p_lambda: a.p_lambda,
                k_max: a.bounds.k_max,
                l_min: a.bounds.l_min,
                l_max: a.bounds.l_max,
                draws: a.draws,
                window_mass: a.window_mass,
                probability: a.probability,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    SuccessRate,
    ChainDepth,
    Applicants,
    DegreeHistogram,
}

/// Long-format row: one metric value per line.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalRow {
    pub block: Block,
    /// `ihc`, `oracle`, or `network` for the degree histogram.
    pub system: &'static str,
    pub directed: bool,
    pub n: usize,
    pub mean_out_degree: f64,
    pub p_r: Option<f64>,
    pub lambda: Option<f64>,
    pub nu: Option<usize>,
    pub rho: Option<f64>,
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub degree: Option<usize>,
    pub value: Option<f64>,
}

pub fn empirical_on(s: &Settings, edges: &EdgeList) -> Result<Vec<EmpiricalRow>> {
    let seed = s.master_seed()?;
    let g = &edges.network;
    let stats = degree_stats(g);
    let base = EmpiricalRow {
        block: Block::DegreeHistogram,
        system: "network",
        directed: g.is_directed(),
        n: g.n(),
        mean_out_degree: stats.mean_out_degree,
        p_r: None,
        lambda: None,
        nu: None,
        rho: None,
        reps: None,
        seed: None,
        degree: None,
        value: None,
    };
    let mut metric_rows = Vec::new();
    for r in paired_runs(s, Some(g))? {
        let summary = summarize(&r.results)?;
        let system = match r.system {
            System::Ihc => "ihc",
            System::Oracle => "oracle",
        };
        for (block, value) in [
            (Block::SuccessRate, Some(summary.success_rate)),
            (Block::ChainDepth, summary.mean_chain_depth),
            (Block::Applicants, Some(summary.mean_applicants)),
        ] {
            metric_rows.push(EmpiricalRow {
                block,
                system,
                p_r: Some(r.p_r),
                lambda: Some(s.lambda),
                nu: Some(r.nu),
                rho: Some(s.rho),
                reps: Some(s.reps),
                seed: Some(seed),
                value,
                ..base.clone()
            });
        }
    }
    // Group by block so each metric reads as one contiguous table.
    metric_rows.sort_by_key(|r| r.block as u8);
    let histogram = stats
        .histogram
        .iter()
        .map(|(&degree, &count)| EmpiricalRow {
            degree: Some(degree),
            value: Some(count as f64),
            ..base.clone()
        });
    Ok(metric_rows.into_iter().chain(histogram).collect())
}

pub fn empirical(s: &Settings) -> Result<Vec<EmpiricalRow>> {
    let path = s
        .edge_list
        .as_deref()
        .ok_or_else(|| crate::error::CliError::config("no edge list given"))?;
    let edges = load_edge_list(path, s.directed)?;
    empirical_on(s, &edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PayoutRow {
    pub budget: u64,
    pub chain_length: usize,
    /// 1 is the hired agent, `chain_length` the initial spreader.
    pub position: usize,
    pub payout: String,
    pub surplus: String,
}

pub fn payout(s: &Settings) -> Result<Vec<PayoutRow>> {
    let mut rows = Vec::new();
    for &budget in &s.budget {
        for &k in &s.chain_length {
            let schedule = compute_payouts(k, budget)?;
            for (i, p) in schedule.payouts.iter().enumerate() {
                rows.push(PayoutRow {
                    budget,
                    chain_length: k,
                    position: i + 1,
                    payout: p.to_string(),
                    surplus: schedule.surplus.to_string(),
                });
            }
        }
    }
    Ok(rows)
}

/// Runs the configured experiment and writes its rows.
pub fn execute(s: &Settings) -> Result<()> {
    let out = s.out.as_deref();
    match s.experiment {
        Experiment::Heatmap => emit(out, s.format, &heatmap(s)?),
        Experiment::BaVsEr => emit(out, s.format, &ba_vs_er(s)?),
        Experiment::IhcVsOracle => emit(out, s.format, &ihc_vs_oracle(s)?),
        Experiment::OracleAnalytic => emit(out, s.format, &oracle_analytic(s)?),
        Experiment::Empirical => emit(out, s.format, &empirical(s)?),
        Experiment::Payout => emit(out, s.format, &payout(s)?),
    }
}
