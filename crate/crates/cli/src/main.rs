use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;

use commands::{cmd_estimate, cmd_sample, cmd_sweep, cmd_verify, print_summary, CliError};
use config::ExperimentConfig;

#[derive(Debug, Parser)]
#[command(name = "dgibbs", version, about = "Delaunay-Gibbs experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON experiment config.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides `sampler.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides `output.dir` (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the sampler and write snapshots and a trace.
    Sample,
    /// Run one estimator and write its results CSV.
    Estimate { estimator: Option<String> },
    /// Run a verification suite and write its JSON report.
    Verify { suite: Option<String> },
    /// Run an estimator over `task.sweep` values.
    Sweep { estimator: Option<String> },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    let path = cli.config.ok_or_else(|| config::ConfigError::Range("--config is required".into()))?;
    let mut cfg = ExperimentConfig::load(&path)?;
    if let Some(s) = cli.seed {
        cfg.sampler.seed = s;
    }
    let out = cli.out.or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
    commands::write_file(&out.join("config.json"), cfg.to_json().as_bytes())?;
    match cli.command {
        Command::Sample => {
            let k = cmd_sample(&cfg, &out)?;
            println!("wrote {k} snapshots to {}", out.display());
        }
        Command::Estimate { estimator } => {
            let p = cmd_estimate(&cfg, estimator.as_deref(), &out)?;
            println!("wrote {}", p.display());
        }
        Command::Verify { suite } => {
            let r = cmd_verify(&cfg, suite.as_deref(), &out)?;
            print_summary(&r);
            if !r.passed() {
                return Err(CliError::SuiteFailed(r.suite));
            }
        }
        Command::Sweep { estimator } => {
            let p = cmd_sweep(&cfg, estimator.as_deref(), &out)?;
            println!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
