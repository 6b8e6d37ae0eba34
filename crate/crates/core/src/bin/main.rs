use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use elastic_mcdg::experiments::{run_experiment, ExperimentConfig, ExperimentKind};
use elastic_mcdg::Error;

#[derive(Parser)]
#[command(version, about = "Monte Carlo DG experiments for the elastic Helmholtz equation in random media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error against the classical mean as the number of modes grows.
    Decay(Common),
    /// Error table over perturbation sizes and mode counts.
    EpsSweep(Common),
    /// Cost of the classical and multi-modes drivers.
    Timing(Common),
    /// Mesh refinement against a manufactured solution.
    Convergence(Common),
    /// Field realizations and the expected displacement.
    FieldDemo(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Base seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::InvalidParameter(_) | Error::UnsupportedQuadrature(_) => 2,
        e if e.is_solver_failure() => 3,
        _ => 1,
    }
}

fn run(kind: ExperimentKind, opts: Common) -> Result<(), Error> {
    let mut config = match &opts.config {
        Some(path) => ExperimentConfig::from_file(path, Some(kind)).map_err(|e| match e {
            Error::Io(io) => Error::Config { path: path.clone(), line: 0, message: io.to_string() },
            other => other,
        })?,
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(out) = opts.out {
        config.out = out;
    }
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    if let Some(n) = opts.threads {
        if n == 0 {
            return Err(Error::InvalidParameter("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    }
    log::info!("running {} into {}", kind.name(), config.out.display());
    let report = run_experiment(&config)?;
    println!("{}", serde_json::to_string_pretty(&report.summary)?);
    println!("wrote {} files to {}", report.files.len(), config.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (kind, opts) = match cli.command {
        Command::Decay(o) => (ExperimentKind::Decay, o),
        Command::EpsSweep(o) => (ExperimentKind::EpsSweep, o),
        Command::Timing(o) => (ExperimentKind::Timing, o),
        Command::Convergence(o) => (ExperimentKind::Convergence, o),
        Command::FieldDemo(o) => (ExperimentKind::FieldDemo, o),
    };
    match run(kind, opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
