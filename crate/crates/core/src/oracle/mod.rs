//! The direct-recommendation baseline ("Oracle"): a star whose center reaches a
//! fraction `rho` of the population and recommends each reached agent once.
//!
//! Two routes to the hire probability live here. [`simulate_oracle`] runs the
//! star through the cascade engine on a sampled [`SkillWorld`].
//! [`oracle_success_probability`] evaluates the closed form
//!
//! ```text
//! P = sum_L Binom(L; N, p_lambda) * sum_l Hyper(l; L, N, draws) * (1 - (1 - p_r)^l)
//! ```
//!
//! where `p_lambda` is the chance that a random agent covers the vacancy,
//! averaged over the distribution of the skill-universe size.

pub mod dist;

use alloc::format;
use alloc::vec::Vec;

use rand::RngCore;

use crate::cascade::{self, AgentProb, CascadeResult, EdgeProb, IhcParams, RunOptions};
use crate::error::{check_prob, Error, Result};
use crate::graph::generate_star;
use crate::rng::{self, SimRng};
use crate::skills::{sample_skill_world_with, SkillWorld};

use dist::{ln_binomial_pmf, ln_choose, ln_hypergeom_pmf, ln_poisson_pmf, log_sum_exp};

pub const DEFAULT_MASS_THRESHOLD: f64 = 0.98;

/// Width of the hirable-count window in binomial standard deviations.
pub const L_WINDOW_SIGMAS: f64 = 2.5;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OracleSpec {
    pub n: usize,
    pub rho: f64,
    pub p_r: f64,
    pub lambda: f64,
    pub nu: usize,
}

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::param("population must have at least one agent"));
        }
        check_prob("rho", self.rho)?;
        check_prob("p_r", self.p_r)?;
        if !(self.lambda.is_finite() && self.lambda > 0.0) {
            return Err(Error::param(format!(
                "lambda = {} must be positive",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Agents the Oracle reaches in the closed form: `round(rho * N)`.
    pub fn draws(&self) -> usize {
        libm::round(self.rho * self.n as f64) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TruncationBounds {
    pub l_min: usize,
    pub l_max: usize,
    pub k_max: usize,
    pub mass_threshold: f64,
}

fn check_threshold(mass_threshold: f64) -> Result<()> {
    if mass_threshold > 0.0 && mass_threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!(
            "mass threshold {mass_threshold} not in (0, 1]"
        )))
    }
}

const K_SEARCH_LIMIT: usize = 100_000;

/// Smallest `K` with `P(max of N Poisson(lambda) counts <= K) >= mass_threshold`.
pub fn k_max(lambda: f64, n: usize, mass_threshold: f64) -> Result<usize> {
    check_threshold(mass_threshold)?;
    for k in 0..K_SEARCH_LIMIT {
        if dist::poisson_max_cdf(Some(k as u64), lambda, n as u64)? >= mass_threshold {
            return Ok(k);
        }
    }
    Err(Error::domain(
        "universe-size search did not reach the mass threshold",
    ))
}

/// Probability that a random agent covers a vacancy of `nu` skills, summing
/// universe sizes `K` up to [`k_max`].
///
/// Each `K` is weighted by `F(K)^N - F(K-1)^N` with the Poisson cdf `F`; the
/// per-`K` term is `sum_{k<=K} Poi(k) C(k, nu) / C(K, nu)`.
pub fn p_lambda(lambda: f64, nu: usize, n: usize, mass_threshold: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::param(format!("lambda = {lambda} must be positive")));
    }
    let top = k_max(lambda, n, mass_threshold)?;
    let (n, nu64) = (n as u64, nu as u64);
    let mut total = 0.0;
    let mut below = 0.0;
    for k_univ in 0..=top as u64 {
        let at = dist::poisson_max_cdf(Some(k_univ), lambda, n)?;
        let weight = at - below;
        below = at;
        if k_univ < nu64 || weight <= 0.0 {
            continue;
        }
        let ln_denominator = ln_choose(k_univ, nu64);
        let terms: Vec<f64> = (nu64..=k_univ)
            .map(|k| Ok(ln_poisson_pmf(k, lambda)? + ln_choose(k, nu64) - ln_denominator))
            .collect::<Result<_>>()?;
        total += weight * libm::exp(log_sum_exp(&terms));
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Summation windows for the closed form.
///
/// `L` spans `mu +- 2.5 sigma` of `Binomial(N, p_lambda)`, clipped to
/// `[0, N]`; `K` stops at [`k_max`].
pub fn truncation_bounds(
    n: usize,
    p_lambda: f64,
    lambda: f64,
    mass_threshold: f64,
) -> Result<TruncationBounds> {
    check_prob("p_lambda", p_lambda)?;
    let mu = n as f64 * p_lambda;
    let sigma = libm::sqrt(mu * (1.0 - p_lambda));
    let l_min = libm::floor(mu - L_WINDOW_SIGMAS * sigma).max(0.0) as usize;
    let l_max = (libm::ceil(mu + L_WINDOW_SIGMAS * sigma) as usize).min(n);
    Ok(TruncationBounds {
        l_min,
        l_max,
        k_max: k_max(lambda, n, mass_threshold)?,
        mass_threshold,
    })
}

/// Which hirable counts the outer sum visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HirableRange {
    /// `[L_min, L_max]` from [`truncation_bounds`].
    #[default]
    Truncated,
    /// Every `L` in `[0, N]`.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OracleAnalysis {
    pub spec: OracleSpec,
    pub p_lambda: f64,
    pub bounds: TruncationBounds,
    pub draws: usize,
    /// Binomial mass of the visited hirable counts.
    pub window_mass: f64,
    pub probability: f64,
}

/// `ln(1 - (1 - p_r)^l)`.
fn ln_any_success(l: u64, p_r: f64) -> f64 {
    if l == 0 || p_r == 0.0 {
        f64::NEG_INFINITY
    } else if p_r == 1.0 {
        0.0
    } else {
        libm::log(-libm::expm1(l as f64 * libm::log1p(-p_r)))
    }
}

/// At least one of `l` independent recommendations succeeds.
pub fn p_success_trial(l: usize, p_r: f64) -> f64 {
    libm::exp(ln_any_success(l as u64, p_r))
}

/// Hire probability given exactly `hirable` hirable agents in the population.
pub fn success_given_hirable(hirable: usize, n: usize, draws: usize, p_r: f64) -> Result<f64> {
    ln_success_given_hirable(hirable as u64, n as u64, draws as u64, p_r).map(libm::exp)
}

fn ln_success_given_hirable(hirable: u64, n: u64, draws: u64, p_r: f64) -> Result<f64> {
    let (lo, hi) = dist::hypergeom_support(hirable, n, draws);
    let terms: Vec<f64> = (lo..=hi)
        .map(|l| Ok(ln_hypergeom_pmf(l, hirable, n, draws)? + ln_any_success(l, p_r)))
        .collect::<Result<_>>()?;
    Ok(log_sum_exp(&terms))
}

/// Evaluates the closed form and reports its intermediate quantities.
pub fn analyze(
    spec: &OracleSpec,
    mass_threshold: f64,
    range: HirableRange,
) -> Result<OracleAnalysis> {
    spec.validate()?;
    let p_lambda = p_lambda(spec.lambda, spec.nu, spec.n, mass_threshold)?;
    let bounds = truncation_bounds(spec.n, p_lambda, spec.lambda, mass_threshold)?;
    let draws = spec.draws();
    let (from, to) = match range {
        HirableRange::Truncated => (bounds.l_min, bounds.l_max),
        HirableRange::Full => (0, spec.n),
    };
    let n = spec.n as u64;
    let mut weights = Vec::with_capacity(to - from + 1);
    let mut terms = Vec::with_capacity(to - from + 1);
    for hirable in from as u64..=to as u64 {
        let ln_weight = ln_binomial_pmf(hirable, n, p_lambda)?;
        // exp underflows below this; such terms cannot move the sum.
        if ln_weight < -745.0 {
            continue;
        }
        weights.push(ln_weight);
        terms.push(ln_weight + ln_success_given_hirable(hirable, n, draws as u64, spec.p_r)?);
    }
    // The window is rescaled to unit mass so that truncation trims the tails
    // of the hirable-count law instead of shrinking the whole probability.
    let ln_mass = log_sum_exp(&weights);
    let probability = libm::exp(log_sum_exp(&terms) - ln_mass).clamp(0.0, 1.0);
    Ok(OracleAnalysis {
        spec: *spec,
        p_lambda,
        bounds,
        draws,
        window_mass: libm::exp(ln_mass),
        probability,
    })
}

/// Closed-form probability that the Oracle produces a hire, summing hirable
/// counts over the `[L_min, L_max]` window.
pub fn oracle_success_probability(spec: &OracleSpec, mass_threshold: f64) -> Result<f64> {
    analyze(spec, mass_threshold, HirableRange::Truncated).map(|a| a.probability)
}

/// Runs the Oracle once on `world`.
///
/// Agent 0 is the Oracle. It reaches `round(rho * (N - 1))` other agents
/// chosen uniformly and recommends each with `p_r`; recommended agents always
/// apply and are hired with their skill-derived probability.
pub fn simulate_oracle(world: &SkillWorld, rho: f64, p_r: f64, seed: u64) -> Result<CascadeResult> {
    simulate_oracle_with(world, rho, p_r, &mut rng::seeded(seed))
}

pub fn simulate_oracle_with(
    world: &SkillWorld,
    rho: f64,
    p_r: f64,
    rng: &mut SimRng,
) -> Result<CascadeResult> {
    check_prob("p_r", p_r)?;
    let star = generate_star(world.n(), rho, rng.next_u64())?;
    let params = IhcParams {
        p_r: EdgeProb::Uniform(p_r),
        p_a: AgentProb::Uniform(1.0),
        p_h: AgentProb::PerAgent(world.hiring_probabilities()),
        max_steps: Some(1),
    };
    cascade::simulate(&star, &params, &[0], rng, RunOptions::default())
}

/// Replication `index` of an Oracle experiment: a fresh world, then one run.
pub fn oracle_replication(
    spec: &OracleSpec,
    master_seed: u64,
    index: u64,
) -> Result<CascadeResult> {
    spec.validate()?;
    let mut rng = rng::replication(master_seed, index);
    let world = sample_skill_world_with(spec.n, spec.lambda, spec.nu, &mut rng)?;
    simulate_oracle_with(&world, spec.rho, spec.p_r, &mut rng)
}
