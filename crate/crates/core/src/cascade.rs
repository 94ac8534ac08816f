//! The independent halting cascade.
//!
//! Every agent is in one of five states. Seeds start as recently recommended.
//! Each step then runs three phases in a fixed order:
//!
//! 1. every recently recommended agent becomes previously recommended and
//!    tries each passive out-neighbor once with `p_r(u, v)`;
//! 2. every agent recommended in this step applies with `p_a(u)`;
//! 3. every applicant of this step is hired with `p_h(u)`.
//!
//! The run stops once a step produces a halter, once nobody is left in the
//! recently-recommended state, or after `max_steps` steps. Seeds never apply.
//! Applicants make exactly one halting attempt.
//!
//! Random draws are consumed in ascending `(u, v)` order for the spread phase,
//! then ascending agent order for applications and halting attempts.
//! Probabilities of exactly 0 or 1 consume nothing, so a run with `p_a = 0`
//! draws exactly what [`ic_reference`] draws.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{check_prob, Error, Result};
use crate::graph::Network;
use crate::rng::{self, flip, SimRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum AgentState {
    Passive,
    RecommendedPrev,
    RecommendedNew,
    Applicant,
    Halter,
}

/// Per-edge recommendation probability.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeProb {
    Uniform(f64),
    /// Indexed by position in the network's arc order (see [`Network::out_edge_range`]).
    PerEdge(Vec<f64>),
}

/// Per-agent application or hiring probability.
#[derive(Debug, Clone, PartialEq)]
pub enum AgentProb {
    Uniform(f64),
    PerAgent(Vec<f64>),
}

impl EdgeProb {
    #[inline]
    fn at(&self, edge: usize) -> f64 {
        match self {
            EdgeProb::Uniform(p) => *p,
            EdgeProb::PerEdge(table) => table[edge],
        }
    }

    fn validate(&self, network: &Network) -> Result<()> {
        match self {
            EdgeProb::Uniform(p) => check_prob("p_r", *p),
            EdgeProb::PerEdge(table) => {
                if table.len() != network.arc_count() {
                    return Err(Error::param(format!(
                        "p_r table has {} entries for {} arcs",
                        table.len(),
                        network.arc_count()
                    )));
                }
                table.iter().try_for_each(|&p| check_prob("p_r", p))
            }
        }
    }
}

impl AgentProb {
    #[inline]
    pub fn at(&self, agent: usize) -> f64 {
        match self {
            AgentProb::Uniform(p) => *p,
            AgentProb::PerAgent(table) => table[agent],
        }
    }

    fn validate(&self, name: &str, n: usize) -> Result<()> {
        match self {
            AgentProb::Uniform(p) => check_prob(name, *p),
            AgentProb::PerAgent(table) => {
                if table.len() != n {
                    return Err(Error::param(format!(
                        "{name} table has {} entries for {n} agents",
                        table.len()
                    )));
                }
                table.iter().try_for_each(|&p| check_prob(name, p))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IhcParams {
    pub p_r: EdgeProb,
    pub p_a: AgentProb,
    pub p_h: AgentProb,
    /// Step cap; `None` means the agent count.
    pub max_steps: Option<usize>,
}

impl IhcParams {
    pub fn homogeneous(p_r: f64, p_a: f64, p_h: f64) -> Self {
        IhcParams {
            p_r: EdgeProb::Uniform(p_r),
            p_a: AgentProb::Uniform(p_a),
            p_h: AgentProb::Uniform(p_h),
            max_steps: None,
        }
    }

    pub fn validate(&self, network: &Network) -> Result<()> {
        self.p_r.validate(network)?;
        self.p_a.validate("p_a", network.n())?;
        self.p_h.validate("p_h", network.n())?;
        if self.max_steps == Some(0) {
            return Err(Error::param("max_steps must be at least 1"));
        }
        Ok(())
    }
}

/// Sizes of the five state sets after one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StateCounts {
    pub passive: usize,
    pub recommended_prev: usize,
    pub recommended_new: usize,
    pub applicant: usize,
    pub halter: usize,
}

impl StateCounts {
    pub fn total(&self) -> usize {
        self.passive + self.recommended_prev + self.recommended_new + self.applicant + self.halter
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CascadeResult {
    pub success: bool,
    /// Agents on the seed-to-halter path, inclusive. For unsuccessful runs,
    /// one more than the deepest recommendation generation reached.
    pub chain_length: usize,
    /// Agents that ever applied.
    pub applicants: usize,
    /// All halters, ascending.
    pub halters: Vec<usize>,
    pub steps: usize,
    /// Smallest seed index.
    pub seed_node: usize,
    /// Agents that ever left the passive state, seeds included.
    pub reached: usize,
    /// Reported chain from seed to halter; empty when unsuccessful.
    pub chain: Vec<usize>,
    /// State-set sizes at t = 0 and after every step, when requested.
    pub trace: Option<Vec<StateCounts>>,
}

/// Options that do not affect the dynamics.
#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub record_trace: bool,
}

const NO_PARENT: usize = usize::MAX;

/// Runs one cascade with a generator seeded from `rng_seed`.
pub fn run_cascade(
    network: &Network,
    params: &IhcParams,
    seeds: &[usize],
    rng_seed: u64,
) -> Result<CascadeResult> {
    params.validate(network)?;
    let mut rng = rng::seeded(rng_seed);
    simulate(network, params, seeds, &mut rng, RunOptions::default())
}

/// Runs one cascade drawing from `rng`. Parameters are assumed validated.
pub fn simulate<R: Rng + ?Sized>(
    network: &Network,
    params: &IhcParams,
    seeds: &[usize],
    rng: &mut R,
    options: RunOptions,
) -> Result<CascadeResult> {
    let n = network.n();
    let seeds = normalize_seeds(seeds, n)?;
    let max_steps = params.max_steps.unwrap_or(n).max(1);

    let mut state = vec![AgentState::Passive; n];
    let mut generation = vec![0u32; n];
    let mut parent = vec![NO_PARENT; n];
    for &s in &seeds {
        state[s] = AgentState::RecommendedNew;
    }

    let mut counts = StateCounts {
        passive: n - seeds.len(),
        recommended_new: seeds.len(),
        ..StateCounts::default()
    };
    let mut trace = options.record_trace.then(|| vec![counts]);

    let mut frontier = seeds.clone();
    let mut fresh = Vec::new();
    let mut step_applicants = Vec::new();
    let mut halters = Vec::new();
    let mut applicants = 0usize;
    let mut reached = seeds.len();
    let mut deepest = 0u32;
    let mut steps = 0usize;

    while !frontier.is_empty() && halters.is_empty() && steps < max_steps {
        steps += 1;
        fresh.clear();
        step_applicants.clear();

        for &u in &frontier {
            state[u] = AgentState::RecommendedPrev;
            let edges = network.out_edge_range(u);
            for (e, &v) in edges.zip(network.out_neighbors(u)) {
                if state[v] == AgentState::Passive && flip(rng, params.p_r.at(e)) {
                    state[v] = AgentState::RecommendedNew;
                    parent[v] = u;
                    generation[v] = generation[u] + 1;
                    fresh.push(v);
                }
            }
        }
        counts.recommended_prev += frontier.len();
        counts.recommended_new = fresh.len();
        counts.passive -= fresh.len();
        reached += fresh.len();
        fresh.sort_unstable();
        if let Some(&v) = fresh.first() {
            deepest = deepest.max(generation[v]);
        }

        for &v in &fresh {
            if flip(rng, params.p_a.at(v)) {
                state[v] = AgentState::Applicant;
                step_applicants.push(v);
            }
        }
        applicants += step_applicants.len();
        counts.recommended_new -= step_applicants.len();
        counts.applicant += step_applicants.len();

        for &v in &step_applicants {
            if flip(rng, params.p_h.at(v)) {
                state[v] = AgentState::Halter;
                halters.push(v);
            }
        }
        counts.applicant -= halters.len();
        counts.halter = halters.len();

        frontier.clear();
        frontier.extend(
            fresh
                .iter()
                .copied()
                .filter(|&v| state[v] == AgentState::RecommendedNew),
        );
        if let Some(t) = trace.as_mut() {
            t.push(counts);
        }
    }

    // Halters of one step share a generation, so the smallest index wins ties.
    let (success, chain_length, chain) = match halters.first() {
        Some(&h) => {
            let mut chain = vec![h];
            let mut cur = h;
            while parent[cur] != NO_PARENT {
                cur = parent[cur];
                chain.push(cur);
            }
            chain.reverse();
            (true, chain.len(), chain)
        }
        None => (false, deepest as usize + 1, Vec::new()),
    };

    Ok(CascadeResult {
        success,
        chain_length,
        applicants,
        halters,
        steps,
        seed_node: seeds[0],
        reached,
        chain,
        trace,
    })
}

fn normalize_seeds(seeds: &[usize], n: usize) -> Result<Vec<usize>> {
    if seeds.is_empty() {
        return Err(Error::param("seed set is empty"));
    }
    if let Some(&s) = seeds.iter().find(|&&s| s >= n) {
        return Err(Error::param(format!("seed {s} outside [0, {n})")));
    }
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(seeds)
}

/// How a batch picks its initial spreaders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedRule {
    Fixed(Vec<usize>),
    /// One agent drawn uniformly per replication.
    UniformSingle,
}

impl SeedRule {
    pub fn draw<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        match self {
            SeedRule::Fixed(seeds) => seeds.clone(),
            SeedRule::UniformSingle => vec![rng.random_range(0..n)],
        }
    }
}

/// Runs replication `index` of a batch. The result depends only on the
/// arguments, so replications may execute in any order or in parallel.
pub fn run_replication(
    network: &Network,
    params: &IhcParams,
    seed_rule: &SeedRule,
    master_seed: u64,
    index: u64,
) -> Result<CascadeResult> {
    let mut rng: SimRng = rng::replication(master_seed, index);
    let seeds = seed_rule.draw(network.n(), &mut rng);
    simulate(network, params, &seeds, &mut rng, RunOptions::default())
}

/// Sequential batch of `n_reps` replications.
pub fn run_batch(
    network: &Network,
    params: &IhcParams,
    n_reps: usize,
    seed_rule: &SeedRule,
    master_seed: u64,
) -> Result<Vec<CascadeResult>> {
    check_batch(network, params, n_reps, seed_rule)?;
    (0..n_reps as u64)
        .map(|i| run_replication(network, params, seed_rule, master_seed, i))
        .collect()
}

/// Validation shared by sequential and parallel batch drivers.
pub fn check_batch(
    network: &Network,
    params: &IhcParams,
    n_reps: usize,
    seed_rule: &SeedRule,
) -> Result<()> {
    if n_reps == 0 {
        return Err(Error::param("n_reps must be at least 1"));
    }
    if network.n() == 0 {
        return Err(Error::param("network has no agents"));
    }
    if let SeedRule::Fixed(seeds) = seed_rule {
        normalize_seeds(seeds, network.n())?;
    }
    params.validate(network)
}

/// Plain independent cascade: the number of agents ever activated.
///
/// Draws are consumed exactly as [`run_cascade`] consumes them with `p_a = 0`.
pub fn ic_reference(network: &Network, p_r: f64, seeds: &[usize], rng_seed: u64) -> Result<usize> {
    check_prob("p_r", p_r)?;
    let mut rng = rng::seeded(rng_seed);
    ic_spread(network, p_r, seeds, &mut rng)
}

pub fn ic_spread<R: Rng + ?Sized>(
    network: &Network,
    p_r: f64,
    seeds: &[usize],
    rng: &mut R,
) -> Result<usize> {
    let seeds = normalize_seeds(seeds, network.n())?;
    let mut active = vec![false; network.n()];
    for &s in &seeds {
        active[s] = true;
    }
    let mut reached = seeds.len();
    let mut frontier = seeds;
    let mut next = Vec::new();
    let mut steps = 0;
    while !frontier.is_empty() && steps < network.n() {
        steps += 1;
        next.clear();
        for &u in &frontier {
            for &v in network.out_neighbors(u) {
                if !active[v] && flip(rng, p_r) {
                    active[v] = true;
                    next.push(v);
                }
            }
        }
        reached += next.len();
        next.sort_unstable();
        core::mem::swap(&mut frontier, &mut next);
    }
    Ok(reached)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_er, Network};

    fn path3() -> Network {
        Network::from_edges(3, false, [(0, 1), (1, 2)]).unwrap().0
    }

    #[test]
    fn no_recommendation_no_success() {
        let g = generate_er(50, 5.0, 1).unwrap();
        let r = run_cascade(&g, &IhcParams::homogeneous(0.0, 0.7, 0.9), &[3], 5).unwrap();
        assert!(!r.success);
        assert_eq!((r.chain_length, r.applicants, r.steps), (1, 0, 1));
        assert!(r.halters.is_empty());
    }

    #[test]
    fn complete_graph_direct_hire() {
        let g = generate_er(11, 10.0, 0).unwrap();
        let r = run_cascade(&g, &IhcParams::homogeneous(1.0, 1.0, 1.0), &[0], 0).unwrap();
        assert!(r.success);
        assert_eq!((r.chain_length, r.applicants, r.steps), (2, 10, 1));
        assert_eq!(r.halters.len(), 10);
        assert_eq!(r.chain, [0, 1]);
    }

    #[test]
    fn path_graph_two_step_chain() {
        // 0 recommends 1, who never applies; 1 recommends 2, who applies and is hired.
        let params = IhcParams {
            p_r: EdgeProb::Uniform(1.0),
            p_a: AgentProb::PerAgent(vec![0.0, 0.0, 1.0]),
            p_h: AgentProb::PerAgent(vec![0.0, 0.0, 1.0]),
            max_steps: None,
        };
        let r = run_cascade(&path3(), &params, &[0], 1).unwrap();
        assert!(r.success);
        assert_eq!(r.chain_length, 3);
        assert_eq!(r.chain, [0, 1, 2]);
        assert_eq!(r.steps, 2);
    }

    #[test]
    fn failed_run_reports_deepest_generation() {
        let params = IhcParams::homogeneous(1.0, 0.0, 0.0);
        let r = run_cascade(&path3(), &params, &[0], 1).unwrap();
        assert!(!r.success);
        assert_eq!(r.chain_length, 3);
        assert_eq!(r.reached, 3);
        assert_eq!(r.steps, 3);
    }

    #[test]
    fn failed_applicant_never_retries() {
        // 1 applies and fails at step 1; it must not spread or retry.
        let params = IhcParams {
            p_r: EdgeProb::Uniform(1.0),
            p_a: AgentProb::PerAgent(vec![0.0, 1.0, 1.0]),
            p_h: AgentProb::PerAgent(vec![0.0, 0.0, 1.0]),
            max_steps: None,
        };
        let r = run_cascade(&path3(), &params, &[0], 1).unwrap();
        assert!(!r.success);
        assert_eq!(r.applicants, 1);
        assert_eq!(r.reached, 2);
    }

    #[test]
    fn max_steps_caps_the_run() {
        let line = Network::from_edges(6, true, (0..5).map(|i| (i, i + 1)))
            .unwrap()
            .0;
        let mut params = IhcParams::homogeneous(1.0, 0.0, 0.0);
        params.max_steps = Some(2);
        let r = run_cascade(&line, &params, &[0], 0).unwrap();
        assert_eq!((r.steps, r.reached), (2, 3));
        params.max_steps = Some(0);
        assert!(run_cascade(&line, &params, &[0], 0).is_err());
    }

    #[test]
    fn simultaneous_halters_report_smallest_index() {
        let star = Network::from_edges(4, true, [(0, 3), (0, 1), (0, 2)])
            .unwrap()
            .0;
        let r = run_cascade(&star, &IhcParams::homogeneous(1.0, 1.0, 1.0), &[0], 0).unwrap();
        assert_eq!(r.halters, [1, 2, 3]);
        assert_eq!(r.chain, [0, 1]);
    }

    #[test]
    fn seed_errors() {
        let g = path3();
        let p = IhcParams::homogeneous(0.5, 0.5, 0.5);
        assert!(matches!(
            run_cascade(&g, &p, &[3], 0),
            Err(Error::Parameter(_))
        ));
        assert!(run_cascade(&g, &p, &[], 0).is_err());
        let bad = IhcParams::homogeneous(1.5, 0.5, 0.5);
        assert!(run_cascade(&g, &bad, &[0], 0).is_err());
        let short = IhcParams {
            p_a: AgentProb::PerAgent(vec![0.5]),
            ..p
        };
        assert!(run_cascade(&g, &short, &[0], 0).is_err());
    }

    #[test]
    fn per_edge_table_is_respected() {
        // Arc order for the path: (0,1), (1,0), (1,2), (2,1).
        let g = path3();
        let params = IhcParams {
            p_r: EdgeProb::PerEdge(vec![1.0, 1.0, 0.0, 1.0]),
            ..IhcParams::homogeneous(0.0, 0.0, 0.0)
        };
        let r = run_cascade(&g, &params, &[0], 0).unwrap();
        assert_eq!(r.reached, 2);
    }

    #[test]
    fn trace_conserves_agents() {
        let g = generate_er(200, 6.0, 4).unwrap();
        let params = IhcParams::homogeneous(0.3, 0.2, 0.3);
        let mut rng = rng::seeded(9);
        let r = simulate(
            &g,
            &params,
            &[0, 5],
            &mut rng,
            RunOptions { record_trace: true },
        )
        .unwrap();
        let trace = r.trace.unwrap();
        assert_eq!(trace.len(), r.steps + 1);
        assert!(trace.iter().all(|c| c.total() == 200));
        assert_eq!(trace.last().unwrap().halter, r.halters.len());
    }

    #[test]
    fn batch_is_reproducible() {
        let g = generate_er(100, 5.0, 2).unwrap();
        let p = IhcParams::homogeneous(0.3, 0.3, 0.5);
        let a = run_batch(&g, &p, 20, &SeedRule::UniformSingle, 77).unwrap();
        let b = run_batch(&g, &p, 20, &SeedRule::UniformSingle, 77).unwrap();
        assert_eq!(a, b);
        assert!(run_batch(&g, &p, 0, &SeedRule::UniformSingle, 77).is_err());
        assert!(run_batch(&g, &p, 1, &SeedRule::Fixed(vec![100]), 77).is_err());
    }

    #[test]
    fn zero_recommendation_batch() {
        let g = generate_er(100, 5.0, 2).unwrap();
        let p = IhcParams::homogeneous(0.0, 0.5, 0.5);
        let rs = run_batch(&g, &p, 100, &SeedRule::UniformSingle, 1).unwrap();
        assert!(rs.iter().all(|r| !r.success));
    }

    #[test]
    fn ic_reference_extremes() {
        let g = generate_er(60, 59.0, 0).unwrap();
        assert_eq!(ic_reference(&g, 1.0, &[4], 0).unwrap(), 60);
        assert_eq!(ic_reference(&g, 0.0, &[4, 7], 0).unwrap(), 2);
    }
}
