mod commands;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use config::ExperimentConfig;
use run::{read_report, RunDir};

/// Reproducible experiments on the N-fermion quasi-periodic lattice model.
#[derive(Parser)]
#[command(name = "nparticle", version)]
struct Cli {
    /// JSON experiment config; built-in defaults fill missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set scenario.g=4` or `--set wegner.trials=0`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Root under which run directories are created.
    #[arg(long, env = "NPARTICLE_OUT", default_value = "runs", global = true)]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ball sizes, boundaries and shift-equivalence classes.
    Graph,
    /// Exact spectrum of the finite Hamiltonian on the configured domain.
    Spectrum,
    /// Localization centres, decay rates and eigenfunction correlator.
    Localize,
    /// Scale sequence and sparseness of singular or resonant balls.
    Msa,
    /// Monte-Carlo eigenvalue-concentration estimates with failure records.
    Wegner,
    /// Distinct truncated operators over a phase grid.
    Entropy,
    /// Recompute the failures recorded in an earlier wegner run.
    Replay {
        /// Run directory holding `config.json` and `failures.json`.
        run: PathBuf,
        /// Replay only this trial index.
        #[arg(long)]
        trial: Option<usize>,
    },
}

fn execute(cli: Cli) -> Result<bool> {
    let (cfg, mut warnings, name) = match &cli.command {
        Command::Replay { run, .. } => {
            let cfg: ExperimentConfig = read_report(&run.join("config.json"))?;
            (cfg, Vec::new(), "replay")
        }
        other => {
            let text = cli.config.as_ref().map(|p| std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))).transpose()?;
            let (cfg, warnings) = ExperimentConfig::load(text.as_deref(), &cli.overrides)?;
            let name = match other {
                Command::Graph => "graph",
                Command::Spectrum => "spectrum",
                Command::Localize => "localize",
                Command::Msa => "msa",
                Command::Wegner => "wegner",
                Command::Entropy => "entropy",
                Command::Replay { .. } => unreachable!(),
            };
            (cfg, warnings, name)
        }
    };
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global().context("cannot size the worker pool")?;
    }
    let mut run = RunDir::create(&cli.out, name, &cfg)?;
    let outcome = match &cli.command {
        Command::Graph => commands::graph(&cfg, &mut run),
        Command::Spectrum => commands::spectrum(&cfg, &mut run),
        Command::Localize => commands::localize(&cfg, &mut run),
        Command::Msa => commands::msa(&cfg, &mut run),
        Command::Wegner => commands::wegner(&cfg, &mut run),
        Command::Entropy => commands::entropy(&cfg, &mut run),
        Command::Replay { run: source, trial } => commands::replay_run(source, *trial, &mut run),
    }?;
    warnings.extend(outcome.warnings);
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let passed = outcome.checks.values().all(|&ok| ok);
    let dir = run.finish(name, &outcome.checks, &warnings, rayon::current_num_threads())?;
    println!("{}", json!({ "command": name, "run_dir": dir, "passed": passed, "checks": outcome.checks }));
    Ok(passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
