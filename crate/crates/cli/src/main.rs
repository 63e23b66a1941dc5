//! Command-line front end for the model-space laboratory.
//!
//! Every subcommand reads one JSON config file, runs a deterministic
//! computation from `modelspace-core`, and writes a CSV (default) or JSON
//! report to `--out` or stdout. Exit codes: 0 success, 2 unusable
//! invocation or config, 3 violated precondition, 4 capped quadrature
//! under `--strict` (the report is still written).

mod commands;
mod config;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{Format, RunOutput};
use config::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Parser)]
#[command(
    name = "modelspace-lab",
    version,
    about = "Trace-space laboratory for finite interpolating Blaschke products"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON config file (required by every subcommand)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the config seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the quadrature node cap (power of two)
    #[arg(long, global = true)]
    nodes: Option<usize>,

    /// Override the successive-grid relative tolerance for Hardy norms
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Exit 4 when any quadrature hit its node cap before converging
    #[arg(long, global = true)]
    strict: bool,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Config override, `key=value` with dotted paths (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Separation constants, Carleson constant, and interpolation verdict
    Diagnose,
    /// Trace transform, its inverse round trip, and the composition defect
    Tilde,
    /// Model-space interpolant with norms, cross-checks, and residue defects
    Interpolate,
    /// Radial counterexample separating the trace conditions
    Counterexample,
    /// Ratio scan of interpolant norm against the two-sided trace sum
    ScanConjecture,
    /// Embedding-bound scan for random traces against the Carleson constant
    ScanNecessity,
    /// Weighted operator-norm bounds of the transform across sizes
    ScanOperator,
}

/// Honors `MODELSPACE_LAB_THREADS` before any parallel region starts.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("MODELSPACE_LAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .map_err(|_| CliError::Config(format!("MODELSPACE_LAB_THREADS='{raw}' is not a thread count")))?;
    if threads == 0 {
        return Err(CliError::Config(
            "MODELSPACE_LAB_THREADS must be at least 1".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

fn run(cli: &Cli) -> Result<RunOutput, CliError> {
    configure_threads()?;
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let mut file = config::load(path, &cli.set)?;

    // Flags win over the file.
    if cli.seed.is_some() {
        file.seed = cli.seed;
    }
    if cli.nodes.is_some() {
        file.grid_cap = cli.nodes;
    }
    if cli.tol.is_some() {
        file.tol = cli.tol;
    }

    let format = match cli.format {
        OutputFormat::Csv => Format::Csv,
        OutputFormat::Json => Format::Json,
    };
    match cli.command {
        Command::Diagnose => commands::diagnose(&file, format),
        Command::Tilde => commands::tilde(&file, format),
        Command::Interpolate => commands::interpolate(&file, format),
        Command::Counterexample => commands::counterexample(&file, format),
        Command::ScanConjecture => commands::scan_conjecture(&file, format),
        Command::ScanNecessity => commands::scan_necessity(&file, format),
        Command::ScanOperator => commands::scan_operator(&file, format),
    }
}

fn write_output(cli: &Cli, output: &RunOutput) -> Result<(), CliError> {
    let write_err =
        |path: &PathBuf, e: std::io::Error| CliError::Config(format!("cannot write {}: {e}", path.display()));
    match &cli.out {
        Some(path) => std::fs::write(path, &output.text).map_err(|e| write_err(path, e))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(output.text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Config(format!("cannot write stdout: {e}")))?;
        }
    }
    for (path, text) in &output.aux_files {
        std::fs::write(path, text).map_err(|e| write_err(path, e))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = match run(&cli) {
        Ok(output) => output,
        Err(e) => {
            eprintln!("{}", e.message());
            return e.exit_code();
        }
    };
    if let Err(e) = write_output(&cli, &output) {
        eprintln!("{}", e.message());
        return e.exit_code();
    }
    if cli.strict && !output.converged {
        let e = CliError::NotConverged;
        eprintln!("{}", e.message());
        return e.exit_code();
    }
    ExitCode::SUCCESS
}
