use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qif_core::cli::{self, EXIT_USAGE};

/// Belief-based quantitative information flow analysis.
///
/// Exit codes: 0 success, 2 validation error, 3 impossible observation,
/// 4 unreadable file, 5 program parse error, 64 usage error.
#[derive(Parser)]
#[command(name = "qif", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and report every flow metric.
    Analyze {
        scenario: PathBuf,
        /// Emit JSON with full float precision.
        #[arg(long)]
        machine: bool,
        /// Report every observation the true high state can produce.
        #[arg(long)]
        enumerate_observations: bool,
    },
    /// Print CSV data for a comparison curve.
    ///
    /// disc: discrimination constructs against a reference belief of 1/2.
    /// div: D and D' from Bernoulli(t) to the point mass on the first outcome.
    /// metric: Q and Q'' over the postbelief, prebelief 0.01, three secrets.
    Sweep {
        #[arg(long, value_parser = ["disc", "div", "metric"])]
        kind: String,
        #[arg(long)]
        steps: usize,
    },
    /// Check size-consistency of each metric's range and admissibility of
    /// the prebelief.
    Check {
        scenario: PathBuf,
        /// Admissibility factor; overrides the scenario's `epsilon`.
        #[arg(long)]
        epsilon: Option<String>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match args.command {
        Command::Analyze { scenario, machine, enumerate_observations } => {
            cli::cmd_analyze(&scenario, machine, enumerate_observations)
        }
        Command::Sweep { kind, steps } => cli::cmd_sweep(&kind, steps),
        Command::Check { scenario, epsilon } => cli::cmd_check(&scenario, epsilon.as_deref()),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qif: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
