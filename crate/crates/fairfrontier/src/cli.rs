//! Command-line definitions and dispatch.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fairfrontier_core::oracle::MIN_DRAWS;
use fairfrontier_core::ScenarioId;

use crate::commands;
use crate::config::{RunConfig, Settings};
use crate::error::{CliError, Result, EXIT_CHECK_FAILED, EXIT_OK};
use crate::exec::Rayon;
use crate::scenario_file;

#[derive(Debug, Parser)]
#[command(
    name = "fairfrontier",
    version,
    about = "Exact accuracy/fairness Pareto frontiers for group-conditional populations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep a classifier family and write frontier, decomposition, check and plot artifacts.
    Run(RunArgs),
    /// List the built-in scenarios.
    Scenarios(ScenariosArgs),
    /// Run the structural checks only; exits 1 when a checked conclusion fails.
    Check(CheckArgs),
    /// Compare analytic quantities with Monte-Carlo estimates and the Pareto filter with the pairwise oracle.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Args)]
pub struct ScenariosArgs {
    /// Also write each preset as a scenario file into this directory.
    #[arg(long)]
    pub write: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Check every preset instead of one scenario.
    #[arg(long, conflicts_with = "scenario")]
    pub all: bool,
    #[command(flatten)]
    pub settings: Settings,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Preset name or scenario file; every preset when omitted.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Monte-Carlo draws per classifier.
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: usize,
    /// Base seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

fn settings_for(config: Option<&PathBuf>, flags: Settings) -> Result<RunConfig> {
    RunConfig::from_settings(&Settings::resolve(flags, config.map(PathBuf::as_path))?)
}

/// Runs a parsed command and returns the process exit status.
pub fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Run(args) => {
            let cfg = settings_for(args.config.as_ref(), args.settings)?;
            let exec = Rayon::from_env()?;
            let outcome = commands::run(&cfg, &exec)?;
            for f in &outcome.files {
                println!("{}", f.display());
            }
            Ok(EXIT_OK)
        }
        Command::Scenarios(args) => {
            print!("{}", commands::scenarios_text());
            if let Some(dir) = args.write {
                for p in commands::write_presets(&dir)? {
                    println!("{}", p.display());
                }
            }
            Ok(EXIT_OK)
        }
        Command::Check(args) => {
            let cfg = settings_for(args.config.as_ref(), args.settings)?;
            let exec = Rayon::from_env()?;
            let names: Vec<String> = if args.all {
                ScenarioId::ALL
                    .iter()
                    .map(|id| id.name().to_owned())
                    .collect()
            } else {
                vec![cfg.scenario.clone()]
            };
            let mut failed = 0usize;
            for name in &names {
                let reports =
                    commands::check(name, &cfg.family, &cfg.weights, cfg.jump_threshold, &exec)?;
                println!("== {name}");
                print!("{}", commands::reports_text(&reports));
                failed += reports.iter().filter(|r| !r.passed()).count();
            }
            if failed > 0 {
                eprintln!("{failed} checked conclusion(s) failed");
                return Ok(EXIT_CHECK_FAILED);
            }
            Ok(EXIT_OK)
        }
        Command::Oracle(args) => {
            if args.draws < MIN_DRAWS {
                return Err(CliError::Config(format!(
                    "--draws must be at least {MIN_DRAWS}"
                )));
            }
            let exec = Rayon::from_env()?;
            let models = match &args.scenario {
                Some(s) => vec![scenario_file::load(s)?],
                None => ScenarioId::ALL.iter().map(|id| id.model()).collect(),
            };
            let w = fairfrontier_core::MetricWeights::default();
            let mut ok = true;
            for m in &models {
                let outcome = commands::oracle_suite(m, &w, args.draws, args.seed, &exec)?;
                println!("== {}", m.label());
                print!("{}", outcome.text());
                ok &= outcome.passed();
            }
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}
