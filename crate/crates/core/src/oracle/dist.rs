//! Poisson, binomial and hypergeometric kernels evaluated in log space.
//!
//! Binomial coefficients at population sizes in the thousands overflow `f64`,
//! so every pmf is assembled from log-gamma terms and exponentiated last.

use alloc::format;

use crate::error::{Error, Result};

/// `ln C(n, k)`, or `-inf` when `k > n`.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

fn ln_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

fn check_rate(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "Poisson rate {lambda} must be finite and >= 0"
        )))
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("probability {p} not in [0, 1]")))
    }
}

pub fn ln_poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    if lambda == 0.0 {
        return Ok(if k == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    Ok(k as f64 * libm::log(lambda) - lambda - ln_factorial(k))
}

pub fn poisson_pmf(k: u64, lambda: f64) -> Result<f64> {
    ln_poisson_pmf(k, lambda).map(libm::exp)
}

/// `P(X > k)`, summed over the upper tail when `k` is past the mode so that
/// values far below machine epsilon keep their relative precision.
pub fn poisson_sf(k: u64, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    if (k as f64) < lambda {
        return Ok((1.0 - lower_sum(k, lambda)).max(0.0));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    let mut term = libm::exp(ln_poisson_pmf(k + 1, lambda)?);
    let mut sum = 0.0;
    let mut j = k + 1;
    while term > 0.0 && term > sum * 1e-18 {
        sum += term;
        j += 1;
        term *= lambda / j as f64;
    }
    Ok(sum)
}

/// `P(X <= k)`.
pub fn poisson_cdf(k: u64, lambda: f64) -> Result<f64> {
    check_rate(lambda)?;
    if (k as f64) < lambda {
        Ok(lower_sum(k, lambda).min(1.0))
    } else {
        Ok(1.0 - poisson_sf(k, lambda)?)
    }
}

fn lower_sum(k: u64, lambda: f64) -> f64 {
    (0..=k)
        .map(|j| libm::exp(ln_poisson_pmf(j, lambda).unwrap_or(f64::NEG_INFINITY)))
        .sum()
}

/// `P(max of n iid Poisson(lambda) <= k)`; `k = None` stands for `k = -1`.
pub fn poisson_max_cdf(k: Option<u64>, lambda: f64, n: u64) -> Result<f64> {
    let Some(k) = k else { return Ok(0.0) };
    let sf = poisson_sf(k, lambda)?;
    if sf >= 1.0 {
        return Ok(0.0);
    }
    Ok(libm::exp(n as f64 * libm::log1p(-sf)))
}

pub fn ln_binomial_pmf(successes: u64, trials: u64, p: f64) -> Result<f64> {
    check_p(p)?;
    if successes > trials {
        return Ok(f64::NEG_INFINITY);
    }
    let failures = trials - successes;
    let term = |count: u64, q: f64| {
        if count == 0 {
            0.0
        } else if q == 0.0 {
            f64::NEG_INFINITY
        } else {
            count as f64 * libm::log(q)
        }
    };
    Ok(ln_choose(trials, successes) + term(successes, p) + term(failures, 1.0 - p))
}

/// `C(N, L) p^L (1 - p)^(N - L)`.
pub fn binomial_pmf(successes: u64, trials: u64, p: f64) -> Result<f64> {
    ln_binomial_pmf(successes, trials, p).map(libm::exp)
}

/// Support `[max(0, draws - (N - L)), min(L, draws)]` of the hypergeometric law.
pub fn hypergeom_support(marked: u64, population: u64, draws: u64) -> (u64, u64) {
    let lo = draws.saturating_sub(population - marked);
    (lo, marked.min(draws))
}

fn check_hypergeom(marked: u64, population: u64, draws: u64) -> Result<()> {
    if marked > population || draws > population {
        return Err(Error::domain(format!(
            "hypergeometric needs L <= N and draws <= N, got L={marked}, N={population}, draws={draws}"
        )));
    }
    Ok(())
}

pub fn ln_hypergeom_pmf(hits: u64, marked: u64, population: u64, draws: u64) -> Result<f64> {
    check_hypergeom(marked, population, draws)?;
    let (lo, hi) = hypergeom_support(marked, population, draws);
    if hits < lo || hits > hi {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(
        ln_choose(marked, hits) + ln_choose(population - marked, draws - hits)
            - ln_choose(population, draws),
    )
}

/// Probability of `hits` marked items among `draws` taken without replacement
/// from `population` items of which `marked` are marked.
pub fn hypergeom_pmf(hits: u64, marked: u64, population: u64, draws: u64) -> Result<f64> {
    ln_hypergeom_pmf(hits, marked, population, draws).map(libm::exp)
}

/// Stable `ln(sum(exp(x)))` over a slice.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(terms.iter().map(|&t| libm::exp(t - max)).sum::<f64>())
}
