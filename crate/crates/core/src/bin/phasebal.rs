use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phasebal::cli;

#[derive(Parser)]
#[command(name = "phasebal", version, about = "Phase-balanced orbiting of unicycle swarms")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a scenario file and report each agent's initial error.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Simulate a scenario; writes trajectory.csv and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Log every N-th step (overrides the scenario file).
        #[arg(long)]
        decimation: Option<usize>,
    },
    /// Sample the curve and its offset boundary; writes curve.csv and boundary.csv.
    Curve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 721)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time direct vs interpolated arc length.
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = cli::BENCH_CALLS)]
        calls: usize,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mut stdout = io::stdout().lock();
    let mut stderr = io::stderr();
    let result = match &args.command {
        Command::Validate { config } => cli::cmd_validate(config, &mut stdout),
        Command::Run {
            config,
            out,
            decimation,
        } => cli::cmd_run(config, out, *decimation, &mut stdout).map(|_| ()),
        Command::Curve {
            config,
            samples,
            out,
        } => cli::cmd_curve(config, *samples, out, &mut stderr),
        Command::Bench { config, calls } => cli::cmd_bench(config, *calls, &mut stdout).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
