//! Replications spread over a thread pool. Each replication owns its random
//! stream, so these return exactly what the sequential drivers return.

use ihc_core::cascade::{check_batch, run_replication, CascadeResult, IhcParams, SeedRule};
use ihc_core::oracle::{oracle_replication, OracleSpec};
use ihc_core::{Network, Result};
use rayon::prelude::*;

pub fn run_batch_par(
    network: &Network,
    params: &IhcParams,
    n_reps: usize,
    seed_rule: &SeedRule,
    master_seed: u64,
) -> Result<Vec<CascadeResult>> {
    check_batch(network, params, n_reps, seed_rule)?;
    (0..n_reps as u64)
        .into_par_iter()
        .map(|i| run_replication(network, params, seed_rule, master_seed, i))
        .collect()
}

pub fn oracle_batch_par(
    spec: &OracleSpec,
    n_reps: usize,
    master_seed: u64,
) -> Result<Vec<CascadeResult>> {
    spec.validate()?;
    (0..n_reps as u64)
        .into_par_iter()
        .map(|i| oracle_replication(spec, master_seed, i))
        .collect()
}
