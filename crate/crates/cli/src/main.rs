//! `mtb`: evaluate exact Bayes success probabilities and the bounds that
//! dominate them on scenario files, sweep tensorized bounds across sample
//! sizes, and run the randomized verification suites.
//!
//! Exit codes: 0 success, 1 usage/parse/schema, 2 domain/I-O, 3 theorem
//! violation.

mod commands;
mod report;
mod scenario;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{cmd_eval, cmd_sweep, cmd_verify, Format};
use scenario::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "mtb",
    version,
    about = "Bayes success probabilities and minimax lower bounds for finite hypothesis families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the requested bounds and oracles on one scenario
    Eval {
        /// Scenario JSON file
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Write the report here instead of stdout (atomic)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate tensorized bounds across i.i.d. sample sizes
    Sweep {
        /// Scenario JSON file
        scenario: PathBuf,
        /// Comma-separated sample sizes, e.g. 1,2,5,10
        #[arg(long)]
        n: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        /// Write the report here instead of stdout (atomic)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized verification suites
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Size of the main random-family batch
        #[arg(long, default_value_t = 200)]
        families: usize,
    },
}

/// Test hook: scales the power-divergence bounds inside `verify` to prove
/// the soundness checker trips.
fn fault_from_env() -> Result<Option<f64>, CliError> {
    match std::env::var("MTB_FAULT_VJ_SCALE") {
        Ok(raw) => raw.parse::<f64>().map(Some).map_err(|_| {
            CliError::Schema(format!("MTB_FAULT_VJ_SCALE must be a number, got {raw:?}"))
        }),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval {
            scenario,
            format,
            out,
        } => cmd_eval(&scenario, format.into(), out.as_deref()),
        Command::Sweep {
            scenario,
            n,
            format,
            out,
        } => cmd_sweep(&scenario, &n, format.into(), out.as_deref()),
        Command::Verify { seed, families } => cmd_verify(seed, families, fault_from_env()?),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here as non-errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
