//! Experiment settings: a preset, then a TOML file, then command-line flags,
//! each layer overriding the one before.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Deserialize;

use crate::error::{CliError, Result};
use crate::io::Format;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Heatmap,
    BaVsEr,
    IhcVsOracle,
    OracleAnalytic,
    Empirical,
    Payout,
}

impl Experiment {
    pub fn is_stochastic(self) -> bool {
        !matches!(self, Experiment::OracleAnalytic | Experiment::Payout)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Experiment::Heatmap => "heatmap",
            Experiment::BaVsEr => "ba_vs_er",
            Experiment::IhcVsOracle => "ihc_vs_oracle",
            Experiment::OracleAnalytic => "oracle_analytic",
            Experiment::Empirical => "empirical",
            Experiment::Payout => "payout",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Networks of 1000-2000 agents and 100-200 replications.
    #[default]
    Desk,
    /// 5000 agents and the replication counts used for the published figures.
    Paper,
}

/// A partial configuration. Every field is optional; present fields replace
/// the value below them.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub experiment: Option<Experiment>,
    pub preset: Option<Preset>,
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub n: Option<usize>,
    pub mean_degree: Option<f64>,
    pub ba_n0: Option<usize>,
    pub ba_k: Option<usize>,
    pub p_r: Option<Vec<f64>>,
    pub p_a: Option<Vec<f64>>,
    pub p_h: Option<Vec<f64>>,
    pub lambda: Option<f64>,
    pub nu: Option<Vec<usize>>,
    pub rho: Option<f64>,
    pub mass_threshold: Option<f64>,
    pub edge_list: Option<PathBuf>,
    pub directed: Option<bool>,
    pub budget: Option<Vec<u64>>,
    pub chain_length: Option<Vec<usize>>,
}

/// Reads a TOML config. Relative paths inside it resolve against its directory.
pub fn load_config(path: &Path) -> Result<Overrides> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut o: Overrides = toml::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [&mut o.edge_list, &mut o.out].into_iter().flatten() {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(o)
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: Experiment,
    pub preset: Preset,
    pub seed: Option<u64>,
    pub reps: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub n: usize,
    pub mean_degree: f64,
    pub ba_n0: usize,
    pub ba_k: usize,
    pub p_r: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_h: Vec<f64>,
    pub lambda: f64,
    pub nu: Vec<usize>,
    pub rho: f64,
    pub mass_threshold: f64,
    pub edge_list: Option<PathBuf>,
    pub directed: bool,
    pub budget: Vec<u64>,
    pub chain_length: Vec<usize>,
}

fn steps(from: f64, to: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| from + (to - from) * i as f64 / (count - 1) as f64)
        .collect()
}

const SPARSE_P_R: [f64; 12] = [
    0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.4, 0.5, 0.75, 1.0,
];

impl Settings {
    pub fn preset(experiment: Experiment, preset: Preset) -> Settings {
        let paper = preset == Preset::Paper;
        let mut s = Settings {
            experiment,
            preset,
            seed: None,
            reps: if paper { 200 } else { 100 },
            out: None,
            format: Format::Csv,
            n: if paper { 5000 } else { 2000 },
            mean_degree: 50.0,
            ba_n0: 50,
            ba_k: 50,
            p_r: SPARSE_P_R.to_vec(),
            p_a: vec![0.1],
            p_h: vec![0.5],
            lambda: 3.0,
            nu: vec![4, 6, 8],
            rho: 0.5,
            mass_threshold: ihc_core::oracle::DEFAULT_MASS_THRESHOLD,
            edge_list: None,
            directed: false,
            budget: vec![1000],
            chain_length: (1..=10).collect(),
        };
        match experiment {
            Experiment::Heatmap => {
                s.n = if paper { 5000 } else { 1000 };
                s.reps = 100;
                s.p_r = if paper {
                    [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0].to_vec()
                } else {
                    [0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0].to_vec()
                };
                s.p_a = steps(0.0, 1.0, if paper { 21 } else { 11 });
                s.p_h = vec![0.1, 0.5, 1.0];
            }
            Experiment::BaVsEr => {
                s.reps = if paper { 10_000 } else { 200 };
                s.p_r = vec![0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0];
            }
            Experiment::IhcVsOracle => {
                s.mean_degree = 20.0;
                s.reps = 200;
            }
            Experiment::OracleAnalytic => {
                s.n = 5000;
                s.p_r = steps(0.05, 1.0, 20);
            }
            Experiment::Empirical => s.reps = 200,
            Experiment::Payout => {}
        }
        s
    }

    /// Preset, then `file`, then `flags`. The preset itself may come from
    /// either layer; flags win.
    pub fn resolve(
        experiment: Experiment,
        file: Option<&Overrides>,
        flags: &Overrides,
    ) -> Result<Settings> {
        let file_default = Overrides::default();
        let file = file.unwrap_or(&file_default);
        if let Some(e) = file.experiment.filter(|&e| e != experiment) {
            return Err(CliError::config(format!(
                "config file is for experiment {e}, not {experiment}"
            )));
        }
        let preset = flags.preset.or(file.preset).unwrap_or_default();
        let mut s = Settings::preset(experiment, preset);
        s.apply(file);
        s.apply(flags);
        s.validate()?;
        Ok(s)
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &o.$field { self.$field = v.clone(); })*
            };
        }
        take!(
            reps,
            format,
            n,
            mean_degree,
            ba_n0,
            ba_k,
            p_r,
            p_a,
            p_h,
            lambda,
            nu,
            rho
        );
        take!(mass_threshold, directed, budget, chain_length);
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if o.edge_list.is_some() {
            self.edge_list.clone_from(&o.edge_list);
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(CliError::config(m));
        let e = self.experiment;
        if e.is_stochastic() {
            if self.seed.is_none() {
                return bad("a seed is required (--seed or `seed` in the config file)".into());
            }
            if self.reps == 0 {
                return bad("reps must be at least 1".into());
            }
        }
        let check_grid = |name: &str, g: &[f64]| -> Result<()> {
            if g.is_empty() {
                return bad(format!("{name} grid is empty"));
            }
            match g.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                Some(p) => bad(format!("{name} value {p} is not a probability")),
                None => Ok(()),
            }
        };
        if e != Experiment::Payout {
            check_grid("p_r", &self.p_r)?;
        }
        if matches!(e, Experiment::Heatmap | Experiment::BaVsEr) {
            check_grid("p_a", &self.p_a)?;
            check_grid("p_h", &self.p_h)?;
            if self.n < 2 {
                return bad(format!("n = {} must be at least 2", self.n));
            }
            if !(self.mean_degree >= 0.0 && self.mean_degree <= (self.n - 1) as f64) {
                return bad(format!(
                    "mean_degree {} not in [0, n - 1]",
                    self.mean_degree
                ));
            }
        }
        if e == Experiment::BaVsEr
            && !(1 <= self.ba_k && self.ba_k <= self.ba_n0 && self.ba_n0 < self.n)
        {
            return bad(format!(
                "BA parameters need 1 <= ba_k <= ba_n0 < n, got k={} n0={} n={}",
                self.ba_k, self.ba_n0, self.n
            ));
        }
        if matches!(
            e,
            Experiment::IhcVsOracle | Experiment::OracleAnalytic | Experiment::Empirical
        ) {
            if self.nu.is_empty() {
                return bad("nu grid is empty".into());
            }
            if !(self.lambda.is_finite() && self.lambda > 0.0) {
                return bad(format!("lambda {} must be positive", self.lambda));
            }
            if !(0.0..=1.0).contains(&self.rho) {
                return bad(format!("rho {} is not in [0, 1]", self.rho));
            }
            if !(self.mass_threshold > 0.0 && self.mass_threshold <= 1.0) {
                return bad(format!(
                    "mass_threshold {} not in (0, 1]",
                    self.mass_threshold
                ));
            }
            if e != Experiment::Empirical && self.n < 1 {
                return bad("n must be at least 1".into());
            }
        }
        if e == Experiment::IhcVsOracle
            && !(self.mean_degree >= 0.0 && self.mean_degree <= (self.n - 1) as f64)
        {
            return bad(format!(
                "mean_degree {} not in [0, n - 1]",
                self.mean_degree
            ));
        }
        if e == Experiment::Empirical && self.edge_list.is_none() {
            return bad("empirical runs need an edge list (--edge-list or `edge_list`)".into());
        }
        if e == Experiment::Payout {
            if self.budget.is_empty() || self.chain_length.is_empty() {
                return bad("budget and chain_length grids must be nonempty".into());
            }
            let max = ihc_core::incentives::MAX_CHAIN_LENGTH as usize;
            if let Some(k) = self.chain_length.iter().find(|&&k| k == 0 || k > max) {
                return bad(format!("chain_length {k} not in [1, {max}]"));
            }
        }
        Ok(())
    }

    /// The master seed of a validated stochastic run.
    pub fn master_seed(&self) -> Result<u64> {
        self.seed
            .ok_or_else(|| CliError::config("a seed is required"))
    }
}
