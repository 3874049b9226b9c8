//! `episcale`: solve and classify SIR dynamics on arbitrary time scales.

mod runner;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use runner::SweepParam;
use scenario::{MethodChoice, Scenario};

/// Exit codes: 1 scenario/usage, 2 math (hypothesis violations, overflow,
/// domain shape), 3 I/O.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Scenario(String),
    #[error("{0}")]
    Math(#[from] episcale::CoreError),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Scenario(_) => 1,
            CliError::Math(_) => 2,
            CliError::Io { .. } => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "episcale",
    version,
    about = "SIR dynamics on time scales: exact solves, numeric recursion, long-term classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a scenario and write one CSV series per method.
    Solve {
        /// Path to a `.scn` scenario file.
        scenario: PathBuf,
        /// Solver route; defaults to the scenario's `method` key.
        #[arg(long)]
        method: Option<MethodChoice>,
        /// Output directory; defaults to $EPISCALE_OUT_DIR, then the working
        /// directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid step on continuous stretches; defaults to the scenario's `h`
        /// key.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Classify the long-term outcome at a horizon.
    Classify {
        scenario: PathBuf,
        /// Classification horizon; defaults to the scenario's `horizon` key.
        #[arg(long)]
        horizon: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
    },
    /// Re-run a scenario over a list of values for one parameter.
    Sweep {
        scenario: PathBuf,
        /// Field to vary; `b` and `c` values become constant rates.
        #[arg(long)]
        param: SweepParam,
        /// Comma-separated numbers, e.g. `--values 0.1,0.3`.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        values: Vec<f64>,
        #[arg(long)]
        method: Option<MethodChoice>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report regressivity and solver hypotheses without solving.
    Check {
        scenario: PathBuf,
        #[arg(long)]
        h: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            scenario,
            method,
            out,
            h,
        } => {
            let sc = Scenario::load(&scenario)?;
            runner::solve(&sc, method, h, &runner::resolve_out_dir(out))
        }
        Command::Classify { scenario, horizon, h } => {
            let sc = Scenario::load(&scenario)?;
            runner::classify(&sc, horizon, h)
        }
        Command::Sweep {
            scenario,
            param,
            values,
            method,
            out,
        } => {
            let sc = Scenario::load(&scenario)?;
            runner::sweep(&sc, param, &values, method, &runner::resolve_out_dir(out))
        }
        Command::Check { scenario, h } => {
            let sc = Scenario::load(&scenario)?;
            runner::check(&sc, h)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors share exit code 1 with scenario errors; help and
            // version are successes.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
