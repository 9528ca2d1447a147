//! Scenario-driven pipelines behind the `growth` binary. Each subcommand
//! reads a TOML scenario, runs one stage and writes CSV and JSON artifacts
//! with fixed float formatting and row order, so identical scenarios give
//! byte-identical files.

pub mod commands;
pub mod output;
pub mod scenario;
pub mod verification;

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

pub use output::Outcome;

#[derive(Debug, Parser)]
#[command(name = "growth", version, about = "Equilibria, paths and taxes for the overlapping-generations growth model")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: GlobalArgs,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct GlobalArgs {
    /// Scenario file (TOML).
    #[arg(long, global = true)]
    pub scenario: Option<PathBuf>,
    /// Output directory; overrides the scenario's `output`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Steady state to solve for, replacing the scenario's run selection.
    #[arg(long = "k-bar", global = true)]
    pub k_bar: Option<f64>,
    /// Initial capital for `simulate` and `fiscal`.
    #[arg(long, global = true)]
    pub k0: Option<f64>,
    /// Simulation horizon in years.
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Write policies even when their verification fails.
    #[arg(long = "allow-unverified", global = true)]
    pub allow_unverified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Construct equilibria and write policy, value pair and verification.
    Solve,
    /// Simulate the path generated by an equilibrium policy.
    Simulate,
    /// Re-run the certificates on policies written by `solve`.
    Verify,
    /// Tax surface, cutoff age, subsidies and lump sums along a path.
    Fiscal,
    /// Steady-state value, renegotiation derivative and stability across the interval.
    Sweep,
    /// Closed-form linear reference case.
    Oracle,
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.args.threads {
        // A second call in the same process keeps the first pool; harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let needs_scenario = cli.command != Command::Oracle;
    let loaded = match &cli.args.scenario {
        Some(p) => Some(scenario::load(p)?),
        None if needs_scenario => anyhow::bail!("--scenario is required for this command"),
        None => None,
    };
    let out = cli
        .args
        .out
        .clone()
        .or_else(|| loaded.as_ref().and_then(|l| l.scenario.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"));
    std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
    let ctx = commands::Ctx { args: cli.args.clone(), out };
    match (cli.command, loaded) {
        (Command::Oracle, l) => commands::oracle::run(&ctx, l.as_ref()),
        (cmd, Some(l)) => match cmd {
            Command::Solve => commands::solve::run(&ctx, &l),
            Command::Simulate => commands::simulate::run(&ctx, &l),
            Command::Verify => commands::verify::run(&ctx, &l),
            Command::Fiscal => commands::fiscal::run(&ctx, &l),
            Command::Sweep => commands::sweep::run(&ctx, &l),
            Command::Oracle => unreachable!("handled above"),
        },
        (_, None) => unreachable!("scenario presence checked above"),
    }
}
