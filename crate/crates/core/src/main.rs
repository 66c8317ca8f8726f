use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use infobudget::cli::{run, Command, Options, Units};

#[derive(Parser)]
#[command(
    name = "infobudget",
    version,
    about = "Information-budget generalization bounds and their empirical checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte-Carlo replications; overrides the config.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Information unit: nats or bits.
    #[arg(long, global = true, default_value = "nats")]
    units: Units,
    /// Directory for report and table files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Oracle quadrature tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-form bounds for a configuration.
    Bound,
    /// Monte-Carlo generalization gap against its bound.
    Gap,
    /// Optimization error of averaged SGLD against its bound.
    Opt,
    /// One-step mutual information oracle sweep.
    Oracle,
    /// Bounds (and optionally gaps) over a parameter grid, as CSV.
    Sweep,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let command = match cli.command {
        Cmd::Bound => Command::Bound,
        Cmd::Gap => Command::Gap,
        Cmd::Opt => Command::Opt,
        Cmd::Oracle => Command::Oracle,
        Cmd::Sweep => Command::Sweep,
    };
    let opts = Options {
        config: cli.config,
        seed: cli.seed,
        reps: cli.reps,
        units: cli.units,
        out: cli.out,
        tol: cli.tol,
    };
    let code = run(
        command,
        &opts,
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code as u8)
}
