use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ihc::config::load_config;
use ihc::experiments::execute;
use ihc::{Experiment, Format, Overrides, Preset, Result, Settings};

/// Independent halting cascade experiments.
#[derive(Debug, Parser)]
#[command(name = "ihc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Success, median chain length and applicants over a (p_r, p_a, p_h) grid on ER networks.
    Heatmap(Common),
    /// Success by seed degree on Barabasi-Albert and Erdos-Renyi networks.
    BaVsEr(Common),
    /// IHC and Oracle on shared skill worlds.
    IhcVsOracle(Common),
    /// Closed-form Oracle success probabilities.
    OracleAnalytic(Common),
    /// Both systems on a network read from an edge list.
    Empirical {
        #[command(flatten)]
        common: Common,
        /// Whitespace-separated edge list; `#` starts a comment line.
        #[arg(long)]
        edge_list: Option<PathBuf>,
        /// Treat edges as directed (`true`) or as undirected (`false`).
        #[arg(long)]
        directed: Option<bool>,
    },
    /// Payout schedules of the recursive incentive split.
    Payout {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        budget: Option<Vec<u64>>,
        #[arg(long, value_delimiter = ',')]
        chain_length: Option<Vec<usize>>,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// TOML file with experiment settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; required for simulations.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, value_enum)]
    preset: Option<Preset>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            reps: self.reps,
            out: self.out.clone(),
            preset: self.preset,
            format: self.format,
            ..Overrides::default()
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let (experiment, common, mut flags) = match &cli.command {
        Command::Heatmap(c) => (Experiment::Heatmap, c, c.overrides()),
        Command::BaVsEr(c) => (Experiment::BaVsEr, c, c.overrides()),
        Command::IhcVsOracle(c) => (Experiment::IhcVsOracle, c, c.overrides()),
        Command::OracleAnalytic(c) => (Experiment::OracleAnalytic, c, c.overrides()),
        Command::Empirical {
            common,
            edge_list,
            directed,
        } => {
            let o = Overrides {
                edge_list: edge_list.clone(),
                directed: *directed,
                ..common.overrides()
            };
            (Experiment::Empirical, common, o)
        }
        Command::Payout {
            common,
            budget,
            chain_length,
        } => {
            let o = Overrides {
                budget: budget.clone(),
                chain_length: chain_length.clone(),
                ..common.overrides()
            };
            (Experiment::Payout, common, o)
        }
    };
    let file = common.config.as_deref().map(load_config).transpose()?;
    flags.experiment = Some(experiment);
    let settings = Settings::resolve(experiment, file.as_ref(), &flags)?;
    execute(&settings)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
