//! `coadjoint`: experiment driver for stochastic Lie-Poisson systems.
//!
//! Every subcommand reads one TOML config, writes CSV/JSON outputs to the
//! output directory and finishes with `manifest.json`. Exit status is 0 on
//! success, 2 for a rejected config or usage error, 3 for a run that stopped
//! early (outputs are kept and end in a truncation marker) and 1 otherwise.

mod attractor;
mod config;
mod drive;
mod error;
mod kicked;
mod lagrange;
mod measure;
mod output;
mod simulate;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "coadjoint", version, about = "Stochastic Lie-Poisson experiments")]
struct Cli {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true, env = "COADJOINT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One trajectory: state, energy and Casimirs every `stride` steps.
    Simulate(CommonArgs),
    /// Rigid-body top Lyapunov exponent over a (theta, sigma) grid.
    LyapunovSweep(CommonArgs),
    /// Pullback ensemble snapshots on one shared noise path.
    Attractor(CommonArgs),
    /// Periodically kicked rigid body: exponent and clusters per amplitude.
    Kicked(CommonArgs),
    /// Conserved quantities and attitude of a Lagrange top.
    LagrangeCheck(CommonArgs),
    /// Long-run histogram against the predicted stationary density.
    InvariantMeasure(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::LyapunovSweep(_) => "lyapunov-sweep",
            Command::Attractor(_) => "attractor",
            Command::Kicked(_) => "kicked",
            Command::LagrangeCheck(_) => "lagrange-check",
            Command::InvariantMeasure(_) => "invariant-measure",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Simulate(a)
            | Command::LyapunovSweep(a)
            | Command::Attractor(a)
            | Command::Kicked(a)
            | Command::LagrangeCheck(a)
            | Command::InvariantMeasure(a) => a,
        }
    }
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Experiment configuration (TOML).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides `solver.seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Overrides `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Overrides `experiment.members` and `experiment.realizations`.
    #[arg(long, value_name = "N")]
    members: Option<usize>,
    /// Keep finished sweep cells from an earlier run in the same directory.
    #[arg(long)]
    resume: bool,
}

/// The loaded config with command-line overrides applied.
pub struct Context {
    pub config: ExperimentConfig,
    pub resume: bool,
}

fn load(args: &CommonArgs) -> Result<Context, CliError> {
    let mut config = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        config.solver.seed = seed;
    }
    if let Some(dir) = &args.out {
        config.output.dir = dir.clone();
    }
    if let Some(n) = args.members {
        config.experiment.members = n;
        config.experiment.realizations = n;
    }
    config.validate()?;
    Ok(Context {
        config,
        resume: args.resume,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    let name = cli.command.name();
    let ctx = load(cli.command.args())?;
    if ctx.resume && !matches!(cli.command, Command::LyapunovSweep(_)) {
        return Err(CliError::Usage(format!("--resume applies to lyapunov-sweep, not {name}")));
    }
    match cli.command {
        Command::Simulate(_) => simulate::run(&ctx, name),
        Command::LyapunovSweep(_) => sweep::run(&ctx, name),
        Command::Attractor(_) => attractor::run(&ctx, name),
        Command::Kicked(_) => kicked::run(&ctx, name),
        Command::LagrangeCheck(_) => lagrange::run(&ctx, name),
        Command::InvariantMeasure(_) => measure::run(&ctx, name),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
