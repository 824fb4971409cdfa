//! Command-line driver for constructing, classifying, and verifying
//! composite traveling-wave profiles.
//!
//! Subcommands:
//! - `classify`: wave-type taxonomy (CH) or speed regime plus glue
//!   candidates (NVW) from a job spec.
//! - `build`: assemble a profile and sample it to CSV or JSON.
//! - `verify`: run a weak-residual bump suite plus junction checks.
//! - `sweep`: classify a Cartesian grid of CH parameter triples.
//!
//! Exit codes: 0 success/admissible, 1 inadmissible or failed
//! verification, 2 input error, 3 numerical failure. Set `WAVECTL_LOG`
//! to `error`, `info`, or `debug` to control diagnostics on stderr.

mod commands;
mod jobspec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CmdError, EXIT_INPUT};
use jobspec::JobSpec;

#[derive(Parser)]
#[command(name = "wavectl", version, about = "Traveling-wave profile toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to the job specification (JSON).
    #[arg(long, value_name = "FILE")]
    spec: PathBuf,
    /// Directory for generated artifacts; reports go to stdout when unset.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tolerance override, repeatable (e.g. --tol root_tol=1e-10).
    #[arg(long, value_name = "KEY=VAL")]
    tol: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Report the wave-type taxonomy (CH) or speed regime and glue
    /// candidates (NVW).
    Classify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Assemble the profile and sample it onto the output grid.
    Build {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run the weak-residual bump suite and junction checks.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of bump test functions in the suite.
        #[arg(long, default_value_t = 16)]
        bumps: usize,
        /// Seed for bump placement.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify a Cartesian grid of CH triples from the spec's `sweep`
    /// ranges.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

fn run() -> Result<i32, CmdError> {
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Classify { common }
        | Command::Build { common }
        | Command::Verify { common, .. }
        | Command::Sweep { common, .. } => common,
    };
    let spec = JobSpec::load(&common.spec)?;
    let tol = spec.tolerances(&common.tol)?;
    let out_dir = common.out.as_deref();
    match &cli.command {
        Command::Classify { .. } => commands::cmd_classify(&spec, out_dir, &tol),
        Command::Build { .. } => commands::cmd_build(&spec, out_dir, &tol),
        Command::Verify { bumps, seed, .. } => {
            if *bumps == 0 {
                return Err(CmdError { code: EXIT_INPUT, message: "--bumps must be >= 1".into() });
            }
            commands::cmd_verify(&spec, out_dir, *bumps, *seed, &tol)
        }
        Command::Sweep { jobs, .. } => commands::cmd_sweep(&spec, out_dir, *jobs),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(
        env_logger::Env::new().filter_or("WAVECTL_LOG", "error"),
    )
    .init();
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wavectl: {}", e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
