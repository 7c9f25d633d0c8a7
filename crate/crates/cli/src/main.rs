use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use secres::commands::{cmd_compare, cmd_criterion, cmd_integrate, cmd_secular};
use secres::error::{CliError, CliResult, Kind};
use secres::schema::Overrides;
use secres_core::criterion::DEFAULT_THRESHOLD;

/// Secular evolution of two-planet systems with first post-Newtonian corrections.
#[derive(Debug, Parser)]
#[command(name = "secres", version)]
struct Cli {
    /// Speed of light in AU/yr; `inf` removes the relativistic terms.
    #[arg(long, global = true, value_name = "AU/yr")]
    c_override: Option<f64>,
    /// Integrator relative tolerance, replacing `integration.rel_tol`.
    #[arg(long, global = true, value_name = "TOL")]
    rel_tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the full equations and write osculating elements as CSV.
    Integrate {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Print the secular matrices, frequencies, modes and envelopes as JSON.
    Secular {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Print the relevance indicator for each system.
    Criterion {
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Numeric and analytic runs in both models, written to a directory.
    Compare {
        file: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let overrides = Overrides { c: cli.c_override, rel_tol: cli.rel_tol };
    let stdout = |text: String| {
        std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| CliError::new(Kind::Io, format!("stdout: {e}")))
    };
    match cli.command {
        Command::Integrate { file, out } => cmd_integrate(&file, &out, &overrides),
        Command::Secular { file, threshold } => stdout(cmd_secular(&file, &overrides, threshold)?),
        Command::Criterion { files, threshold } => stdout(cmd_criterion(&files, &overrides, threshold)?),
        Command::Compare { file, out } => cmd_compare(&file, &out, &overrides).map(|_| ()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.kind().to_string();
            let detail = e.to_string();
            let first = detail.lines().find(|l| !l.trim().is_empty()).unwrap_or(&msg);
            eprintln!("{}", CliError::new(Kind::Usage, first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
