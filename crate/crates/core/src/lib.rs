//! Independent halting cascades on networks.
//!
//! An agent reached by a job posting either passes it on to its passive
//! neighbors or applies for the job; a successful application (a hire) halts
//! the whole cascade. This crate contains the simulation engine, network
//! generators, the skills model that turns skillsets into per-agent
//! probabilities, the recursive incentive split, a closed-form solver for a
//! direct-recommendation baseline, and batch statistics.
//!
//! The crate is `no_std` and needs only `alloc`. File IO, parallel drivers and
//! the command line live in the `ihc` crate.

#![no_std]

extern crate alloc;

pub mod cascade;
pub mod error;
pub mod graph;
pub mod incentives;
pub mod metrics;
pub mod oracle;
pub mod rng;
pub mod skills;

pub use cascade::{
    ic_reference, run_batch, run_cascade, AgentProb, AgentState, CascadeResult, EdgeProb,
    IhcParams, SeedRule,
};
pub use error::{Error, Result};
pub use graph::{degree_stats, generate_ba, generate_er, generate_star, DegreeSummary, Network};
pub use incentives::{compute_payouts, surplus_to_length, PayoutSchedule};
pub use metrics::{classify_regime, summarize, BatchSummary, Regime, RegimeReport};
pub use oracle::{oracle_success_probability, OracleSpec, TruncationBounds};
pub use skills::{bind_params, sample_skill_world, SkillWorld};
