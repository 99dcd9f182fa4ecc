//! Batch front end: argument definitions, dispatch, and report emission.
//!
//! Every run is a pure function of its arguments and input files. Reports are
//! `key=value` lines whose first line names the command.

mod commands;
mod schema;

pub use schema::{declared_keys, report_schema_check, SchemaViolation};

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("no such file: {}", path.display())]
    MissingFile { path: PathBuf },
    #[error("{}: {message}", path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{module}: {message}")]
    Domain { module: &'static str, message: String },
    #[error("invalid arguments: {0}")]
    Usage(String),
}

impl CliError {
    /// Process exit status: 2 for missing or unreadable files, 3 for parse
    /// errors, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingFile { .. } | CliError::Io { .. } => 2,
            CliError::Parse { .. } => 3,
            CliError::Domain { .. } | CliError::Usage(_) => 1,
        }
    }

    pub(crate) fn domain(module: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Domain { module, message: e.to_string() }
    }

    pub(crate) fn parse(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Parse { path: path.to_path_buf(), message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "symdyn", version, about = "Block codes between symbolic systems and toral automorphism tools")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Topological entropy of a shift of finite type (and of a Markov measure on it).
    Entropy(EntropyArgs),
    /// Specification gap and shadowing windows.
    Gap(GapArgs),
    /// Search for a self-distinguishing marker.
    Marker(MarkerArgs),
    /// Choose block-code constants and print the checklist.
    Params(ParamsArgs),
    /// Build and save a boys/girls dictionary.
    Dict(DictArgs),
    /// Encode a source word into the target shift.
    Encode(EncodeArgs),
    /// Decode a coded word back to the source where markers allow.
    Decode(DecodeArgs),
    /// Seeded round trip plus every audit.
    Verify(VerifyArgs),
    /// Splice two points along a random skeleton.
    Splice(SpliceArgs),
    /// Toral automorphism analysis.
    Toral(ToralArgs),
    /// Non-constant circle-valued solutions of a cyclotomic shift equation.
    Halmos(HalmosArgs),
    /// Validate a report file against its command's declared keys.
    CheckReport(CheckReportArgs),
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[arg(long)]
    pub sft: PathBuf,
    /// Markov measure whose entropy is also reported.
    #[arg(long)]
    pub measure: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[arg(long)]
    pub sft: PathBuf,
    /// Shadowing radius; adds the window radius and shadow gap.
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct MarkerArgs {
    #[arg(long)]
    pub sft: PathBuf,
    /// Target measure (defaults to the maximal-entropy measure).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    #[arg(long)]
    pub seed: u64,
    /// Writes the marker scheme here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Practical,
}

/// Source measure, target shift and block-code constants shared by the pipeline commands.
#[derive(Debug, Args)]
pub struct InstanceArgs {
    /// Source Markov measure.
    #[arg(long)]
    pub source: PathBuf,
    /// Target shift of finite type.
    #[arg(long)]
    pub sft: PathBuf,
    /// Target Markov measure (defaults to the maximal-entropy measure).
    #[arg(long)]
    pub target_measure: Option<PathBuf>,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Practical)]
    pub mode: ModeArg,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Monte-Carlo samples for the almost-sure conditions (needs `--seed`).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DictModeArg {
    Enumerative,
    Hall,
}

#[derive(Debug, Args)]
pub struct DictArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Marker scheme file written by `marker`.
    #[arg(long)]
    pub marker: PathBuf,
    #[arg(long, value_enum, default_value_t = DictModeArg::Enumerative)]
    pub dict_mode: DictModeArg,
    /// Paired samples for the Hall relation.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    /// Hall degree constant (defaults to the largest girl degree).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub dict: PathBuf,
    /// Source word as a digit string; sampled from the source when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, required_unless_present = "input")]
    pub length: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub coded: PathBuf,
    /// Recovered word, `.` where unknown.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long)]
    pub dict: PathBuf,
    #[arg(long)]
    pub length: usize,
    #[arg(long)]
    pub seed: u64,
    /// Allowance added to the bad-set bound.
    #[arg(long, default_value_t = 0.0)]
    pub slack: f64,
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    /// Reference pairs drawn from the product joining.
    #[arg(long, default_value_t = 4)]
    pub references: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpliceKindArg {
    Boost,
    FullSupport,
}

#[derive(Debug, Args)]
pub struct SpliceArgs {
    #[arg(long)]
    pub sft: PathBuf,
    #[arg(long, value_enum)]
    pub kind: SpliceKindArg,
    #[arg(long)]
    pub y1: PathBuf,
    /// Second point (boost).
    #[arg(long)]
    pub y2: Option<PathBuf>,
    /// Word planted on every 2 (full-support).
    #[arg(long)]
    pub target_word: Option<PathBuf>,
    #[arg(long)]
    pub n: usize,
    /// Boost only.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Boost only.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Full-support only.
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ToralArgs {
    #[command(subcommand)]
    pub action: ToralAction,
}

#[derive(Debug, Subcommand)]
pub enum ToralAction {
    /// Hyperbolic / central-spin / central-skew / not quasi-hyperbolic.
    Classify {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Certified entropy with an eigenvalue cross-check.
    Entropy {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Split into quasi-hyperbolic and finite-order-eigenvalue parts.
    Split {
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct HalmosArgs {
    /// Cyclotomic index.
    #[arg(long)]
    pub n: usize,
    /// Period.
    #[arg(long)]
    pub m: usize,
}

#[derive(Debug, Args)]
pub struct CheckReportArgs {
    #[arg(long)]
    pub file: PathBuf,
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let report = match &cli.command {
        Command::Entropy(a) => commands::entropy(a)?,
        Command::Gap(a) => commands::gap(a)?,
        Command::Marker(a) => commands::marker(a)?,
        Command::Params(a) => commands::params(a)?,
        Command::Dict(a) => commands::dict(a)?,
        Command::Encode(a) => commands::encode(a)?,
        Command::Decode(a) => commands::decode(a)?,
        Command::Verify(a) => commands::verify(a)?,
        Command::Splice(a) => commands::splice(a)?,
        Command::Toral(a) => commands::toral(a)?,
        Command::Halmos(a) => commands::halmos(a)?,
        Command::CheckReport(a) => commands::check_report(a)?,
    };
    out.write_all(report.as_bytes()).map_err(|e| CliError::Io {
        path: PathBuf::from("<stdout>"),
        message: e.to_string(),
    })
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = write!(err, "{e}");
            return 2;
        }
        Err(e) => {
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    match run(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
