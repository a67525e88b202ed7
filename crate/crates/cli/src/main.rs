mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "sosel",
    version,
    about = "Sparse linear model selection by screening, ordering and GIC"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOptions,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalOptions {
    /// Only print errors.
    #[arg(short, long, global = true, conflicts_with = "verbose")]
    pub quiet: bool,

    /// Print debug diagnostics to standard error.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    /// Output format; not every command supports every format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Replace the master seed of a simulation config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Tsv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Practical,
    Formal,
}

impl From<ModeArg> for sosel::Parametrization {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Practical => sosel::Parametrization::Practical,
            ModeArg::Formal => sosel::Parametrization::Formal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Sos,
    Os,
    Exhaustive,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// CSV file; the last column is the response unless --response says otherwise.
    pub data: PathBuf,

    /// The CSV has no header row.
    #[arg(long)]
    pub no_header: bool,

    /// Response column by header name or 1-based position.
    #[arg(long)]
    pub response: Option<String>,

    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[arg(long, value_enum, default_value_t = AlgorithmArg::Sos)]
    pub algorithm: AlgorithmArg,

    /// GIC penalty per parameter.
    #[arg(
        long,
        required_unless_present = "auto_penalty",
        conflicts_with = "auto_penalty"
    )]
    pub penalty_r: Option<f64>,

    /// Lasso penalty; defaults to 2√r.
    #[arg(long, requires = "penalty_r")]
    pub penalty_rl: Option<f64>,

    /// Derive r = 4σ² ln(p)/a and r_L = 2√r.
    #[arg(long)]
    pub auto_penalty: bool,

    #[arg(long, default_value_t = 0.5, requires = "auto_penalty")]
    pub a: f64,

    /// Noise variance, or `auto` for the full-model residual variance.
    #[arg(long, default_value = "auto", requires = "auto_penalty")]
    pub sigma2: String,

    /// Lasso KKT tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,

    /// Maximum coordinate descent sweeps.
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub config: PathBuf,

    /// Directory for summary.json, trials.tsv and bounds.json.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,

    #[arg(long)]
    pub compare_exhaustive: bool,

    #[arg(long)]
    pub fixed_design: bool,
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub data: DataArgs,

    /// JSON with 1-based `support`, `beta` and optional `sigma2`.
    #[arg(long)]
    pub truth: PathBuf,

    /// Random restarts for each restricted eigenvalue search.
    #[arg(long, default_value_t = sosel::identifiability::DEFAULT_RESTARTS)]
    pub restarts: usize,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// JSON bound input.
    pub input: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Select a model for one data set.
    Fit(FitArgs),
    /// Run a seeded Monte Carlo scenario.
    Simulate(SimulateArgs),
    /// Separation and restricted eigenvalue diagnostics for a known truth.
    Diagnose(DiagnoseArgs),
    /// Evaluate every error bound with its assumption ledger.
    Bounds(BoundsArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = if cli.global.quiet {
        log::LevelFilter::Error
    } else if cli.global.verbose {
        log::LevelFilter::Debug
    } else {
        log::LevelFilter::Warn
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .target(env_logger::Target::Stderr)
        .init();

    let result = match &cli.command {
        Command::Fit(a) => commands::fit(a, &cli.global),
        Command::Simulate(a) => commands::simulate(a, &cli.global),
        Command::Diagnose(a) => commands::diagnose(a, &cli.global),
        Command::Bounds(a) => commands::bounds(a, &cli.global),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
