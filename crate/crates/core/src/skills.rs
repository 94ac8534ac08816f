//! Heterogeneous agents: skillsets, a vacancy, and the probabilities they imply.
//!
//! Generation order matters. All skill counts are drawn first, the universe
//! size is fixed as `max(max_u n_u, n_nu)`, and only then are skill identities
//! and the vacancy drawn from that universe.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::cascade::{AgentProb, EdgeProb, IhcParams};
use crate::error::{check_prob, Error, Result};
use crate::rng;

/// A sampled population together with one vacancy.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SkillWorld {
    pub universe_size: usize,
    pub lambda: f64,
    /// Required skills, ascending.
    pub vacancy: Vec<u32>,
    /// Skillset of each agent, ascending.
    pub agent_skills: Vec<Vec<u32>>,
}

impl SkillWorld {
    pub fn n(&self) -> usize {
        self.agent_skills.len()
    }

    pub fn hiring_probabilities(&self) -> Vec<f64> {
        self.agent_skills
            .iter()
            .map(|s| hiring_probability(s, &self.vacancy))
            .collect()
    }

    pub fn application_probabilities(&self) -> Vec<f64> {
        self.agent_skills
            .iter()
            .map(|s| application_probability(s, &self.vacancy))
            .collect()
    }

    /// Agents whose skillset covers the vacancy.
    pub fn hirable_count(&self) -> usize {
        self.agent_skills
            .iter()
            .filter(|s| is_subset(&self.vacancy, s))
            .count()
    }
}

pub fn sample_skill_world(n: usize, lambda: f64, n_nu: usize, seed: u64) -> Result<SkillWorld> {
    sample_skill_world_with(n, lambda, n_nu, &mut rng::seeded(seed))
}

pub fn sample_skill_world_with<R: Rng + ?Sized>(
    n: usize,
    lambda: f64,
    n_nu: usize,
    rng: &mut R,
) -> Result<SkillWorld> {
    if n < 1 {
        return Err(Error::param("population must have at least one agent"));
    }
    let poisson = Poisson::new(lambda).map_err(|_| {
        Error::param(alloc::format!(
            "lambda = {lambda} must be positive and finite"
        ))
    })?;
    let counts: Vec<usize> = (0..n).map(|_| poisson.sample(rng) as usize).collect();
    let universe = counts.iter().copied().max().unwrap_or(0).max(n_nu);
    let mut draw = |k: usize| -> Vec<u32> {
        let mut s: Vec<u32> = rand::seq::index::sample(rng, universe, k)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        s.sort_unstable();
        s
    };
    let agent_skills = counts.iter().map(|&k| draw(k)).collect();
    let vacancy = draw(n_nu);
    Ok(SkillWorld {
        universe_size: universe,
        lambda,
        vacancy,
        agent_skills,
    })
}

/// `a ⊆ b` for ascending slices.
fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut it = b.iter();
    a.iter().all(|x| it.any(|y| y == x))
}

fn intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// 1 when the skillset covers every requirement, else 0. Inputs are ascending.
pub fn hiring_probability(agent_skills: &[u32], vacancy: &[u32]) -> f64 {
    if is_subset(vacancy, agent_skills) {
        1.0
    } else {
        0.0
    }
}

/// Fraction of requirements met. An empty vacancy gives 1.
pub fn application_probability(agent_skills: &[u32], vacancy: &[u32]) -> f64 {
    if vacancy.is_empty() {
        return 1.0;
    }
    intersection_size(agent_skills, vacancy) as f64 / vacancy.len() as f64
}

/// Per-agent application and hiring tables with homogeneous `p_r`.
pub fn bind_params(world: &SkillWorld, p_r: f64) -> Result<IhcParams> {
    check_prob("p_r", p_r)?;
    Ok(IhcParams {
        p_r: EdgeProb::Uniform(p_r),
        p_a: AgentProb::PerAgent(world.application_probabilities()),
        p_h: AgentProb::PerAgent(world.hiring_probabilities()),
        max_steps: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hiring_examples() {
        assert_eq!(hiring_probability(&[1, 2, 3], &[1, 2]), 1.0);
        assert_eq!(hiring_probability(&[1], &[1, 2]), 0.0);
        assert_eq!(hiring_probability(&[], &[]), 1.0);
        assert_eq!(hiring_probability(&[4, 9], &[]), 1.0);
    }

    #[test]
    fn application_examples() {
        assert_eq!(application_probability(&[1, 2], &[1, 2, 3, 4]), 0.5);
        assert_eq!(application_probability(&[5, 6], &[1, 2, 3, 4]), 0.0);
        assert_eq!(
            application_probability(&[0, 1, 2, 3, 4, 7], &[1, 2, 3, 4]),
            1.0
        );
        assert_eq!(application_probability(&[], &[]), 1.0);
    }

    #[test]
    fn empty_vacancy_world() {
        let w = sample_skill_world(50, 2.0, 0, 3).unwrap();
        assert!(w.vacancy.is_empty());
        assert_eq!(w.hirable_count(), 50);
        let p = bind_params(&w, 0.4).unwrap();
        assert_eq!(p.p_a, AgentProb::PerAgent(alloc::vec![1.0; 50]));
        assert_eq!(p.p_h, AgentProb::PerAgent(alloc::vec![1.0; 50]));
    }

    #[test]
    fn universe_follows_max_rule() {
        // With one agent and a tiny rate the count is almost surely 0; find such a seed.
        let w = (0..100)
            .map(|s| sample_skill_world(1, 0.01, 2, s).unwrap())
            .find(|w| w.agent_skills[0].is_empty())
            .unwrap();
        assert_eq!(w.universe_size, 2);
        assert_eq!(w.vacancy, [0, 1]);
    }

    #[test]
    fn world_invariants() {
        for seed in 0..20 {
            let w = sample_skill_world(300, 3.0, 5, seed).unwrap();
            let max_n = w.agent_skills.iter().map(Vec::len).max().unwrap();
            assert_eq!(w.universe_size, max_n.max(5));
            assert_eq!(w.vacancy.len(), 5);
            for s in w.agent_skills.iter().chain([&w.vacancy]) {
                assert!(s.windows(2).all(|p| p[0] < p[1]));
                assert!(s.iter().all(|&x| (x as usize) < w.universe_size));
            }
        }
    }

    #[test]
    fn mean_skill_count_concentrates() {
        let w = sample_skill_world(5000, 3.0, 4, 21).unwrap();
        let mean = w.agent_skills.iter().map(Vec::len).sum::<usize>() as f64 / 5000.0;
        // 3 sigma of the Poisson sample mean: 3 * sqrt(3 / 5000) = 0.0735.
        assert!((mean - 3.0).abs() < 0.08, "mean {mean}");
    }

    #[test]
    fn specificity_bar_fraction() {
        let w = sample_skill_world(5000, 3.0, 6, 5).unwrap();
        let frac = w.agent_skills.iter().filter(|s| s.len() >= 6).count() as f64 / 5000.0;
        assert!((frac - 0.08).abs() <= 0.01, "fraction {frac}");
    }

    #[test]
    fn hired_implies_applies() {
        let w = sample_skill_world(2000, 3.0, 3, 8).unwrap();
        for (a, h) in w
            .application_probabilities()
            .iter()
            .zip(w.hiring_probabilities())
        {
            assert!(h == 0.0 || h == 1.0);
            assert!((0.0..=1.0).contains(a));
            if h == 1.0 {
                assert_eq!(*a, 1.0);
            }
        }
    }

    #[test]
    fn bad_inputs() {
        assert!(sample_skill_world(0, 3.0, 1, 0).is_err());
        assert!(sample_skill_world(5, 0.0, 1, 0).is_err());
        assert!(sample_skill_world(5, f64::NAN, 1, 0).is_err());
        let w = sample_skill_world(5, 1.0, 1, 0).unwrap();
        assert!(bind_params(&w, 1.2).is_err());
    }
}
