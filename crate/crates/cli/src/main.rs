use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

mod analyze;
mod construct;
mod output;
mod verify;

use construct::{ConstructionArgs, FieldArgs};

/// Exact DLCT, DLU and related spectra for (n,n)-functions over GF(2^n).
#[derive(Debug, Parser)]
#[command(name = "dlct", version)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Allow computations above the desk-scale operation estimate.
    #[arg(long, global = true)]
    long: bool,

    /// Write the artifact here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Quantity {
    /// Differential-linear uniformity with a witness.
    Dlu,
    /// DLCT spectrum over nonzero (u, v).
    Spectrum,
    /// DDT spectrum and differential uniformity.
    Ddt,
    /// Walsh spectrum and nonlinearity.
    Lat,
    /// BCT spectrum and boomerang uniformity.
    Bct,
    /// Nonlinearity, DU, BU and DLU together.
    Properties,
    /// Kloosterman sums over the field.
    Kloosterman,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute one quantity for a construction or an imported S-box.
    Analyze(AnalyzeArgs),
    /// Recompute a reference table and diff it against the expected values.
    Reproduce {
        /// Table id; `list` prints the known ids.
        table_id: String,
    },
    /// Run verification suites and print per-report verdicts.
    Verify(VerifyArgs),
    /// Write a construction as a text S-box file.
    ExportSbox {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        construction: ConstructionArgs,
    },
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(value_enum)]
    pub quantity: Quantity,
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Single Kloosterman argument (hex); without it the whole profile is emitted.
    #[arg(long, value_parser = construct::parse_hex)]
    pub gamma: Option<u32>,
    /// DLCT computation route.
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Naive,
    Transform,
    Auto,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: verify::Suite,
    /// Degrees as a range `3..12` or a list `4,6,8`; each suite has a default.
    #[arg(long)]
    pub n: Option<String>,
    /// Seed for randomized instances.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Modified points per point-modification instance.
    #[arg(long, default_value_t = 2)]
    pub t: usize,
}

#[derive(Debug)]
pub enum CliError {
    /// Bad parameters or refused work; exit status 2.
    Usage(String),
    /// Mismatch or violated verdict; exit status 1.
    Failed(String),
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub struct Context {
    pub format: Format,
    pub long: bool,
    pub output: Option<PathBuf>,
}

/// Refuses work above `2^38` estimated operations unless `--long` is set.
pub const DESK_SCALE_OPS: u128 = 1 << 38;

impl Context {
    pub fn guard(&self, what: &str, ops: u128) -> Result<(), CliError> {
        if ops > DESK_SCALE_OPS && !self.long {
            return Err(CliError::Usage(format!(
                "{what} needs about 2^{:.1} operations; pass --long to run it",
                (ops as f64).log2()
            )));
        }
        Ok(())
    }

    pub fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let ctx = Context { format: cli.format, long: cli.long, output: cli.output };
    match cli.command {
        Command::Analyze(args) => analyze::run(&ctx, &args),
        Command::Reproduce { table_id } => analyze::reproduce(&ctx, &table_id),
        Command::Verify(args) => verify::run(&ctx, &args),
        Command::ExportSbox { field, construction } => {
            let (table, _) = construct::resolve(&field, &construction)?;
            ctx.emit(&table.to_text())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Failed(msg)) => {
            eprintln!("dlct: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("dlct: {msg}");
            ExitCode::from(2)
        }
    }
}
