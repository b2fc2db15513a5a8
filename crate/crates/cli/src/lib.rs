//! Command-line front end for `sidonlab`.
//!
//! Exit codes: 0 when the command succeeds and every checked property holds,
//! 2 when a property fails or the wrapped operation errors, 1 on usage
//! errors (bad flags, malformed literals, invalid config).

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub mod commands;
pub mod config;

pub use config::{Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Operation(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Operation(_) | CliError::Io(_) => 2,
        }
    }

    fn category(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Operation(_) => "operation",
            CliError::Io(_) => "io",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self.category(), "message": self.to_string() }).to_string()
    }
}

/// Whether the checked property held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    PropertyFailure,
}

impl Status {
    pub fn from_bool(holds: bool) -> Self {
        if holds {
            Status::Pass
        } else {
            Status::PropertyFailure
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::PropertyFailure => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sidonlab", version, about = "Sidon sets, Delta-Sidon blocks, weighted shifts and BM operators in exact arithmetic")]
pub struct Cli {
    /// Report format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report to this path (atomically) instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config with the same keys as the flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// On error, print `{"error": .., "message": ..}` to stdout.
    #[arg(long, global = true)]
    pub error_json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sidon tests and generators.
    #[command(subcommand)]
    Sidon(SidonCommand),
    /// Delta-Sidon multiplier families.
    #[command(subcommand)]
    Deltasidon(DeltaSidonCommand),
    /// Weighted backward shifts.
    #[command(subcommand)]
    Shift(ShiftCommand),
    /// Truncated Bayart-Matheron operators.
    #[command(subcommand)]
    Bmop(BmopCommand),
    /// Difference-set density checks.
    #[command(subcommand)]
    Density(DensityCommand),
    /// Weak-mixing witnesses from hitting data.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Config file utilities.
    #[command(subcommand)]
    Config(ConfigCommand),
}

/// A comma separated list literal such as `0,2,4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntList(pub Vec<u64>);

fn list_arg(text: &str) -> Result<IntList, String> {
    config::parse_list(text).map(IntList)
}

#[derive(Debug, Subcommand)]
pub enum SidonCommand {
    /// Decide whether a set is Sidon and print the least violation.
    Check {
        #[arg(long, value_parser = list_arg)]
        set: Option<IntList>,
    },
    /// Print the set J_n.
    Family {
        #[arg(long)]
        n: Option<u64>,
    },
    /// Stream every nonempty subset of [1, bound] that stays Sidon with 0.
    #[command(alias = "generate")]
    Enumerate {
        #[arg(long)]
        bound: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DeltaSidonCommand {
    /// Build and certify the multiplier family over J_1, ..., J_L.
    Build {
        #[arg(long)]
        levels: Option<u32>,
    },
    /// Re-check a stored family for pairwise disjointness.
    Verify { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RuleName {
    SyndeticGap,
    Piecewise,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BlockSpec {
    /// `n_k = k^2 + 2`
    AutoK2,
    List(Vec<u64>),
}

fn block_spec_arg(text: &str) -> Result<BlockSpec, String> {
    if text == "auto-k2" {
        Ok(BlockSpec::AutoK2)
    } else {
        config::parse_list(text).map(BlockSpec::List)
    }
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    #[arg(long, value_enum, default_value = "syndetic-gap")]
    pub rule: RuleName,
    /// `auto-k2` or a comma separated list of block starts.
    #[arg(long, value_parser = block_spec_arg)]
    pub blocks: Option<BlockSpec>,
    /// Complement window for the piecewise rule.
    #[arg(long, value_parser = list_arg)]
    pub complement: Option<IntList>,
    #[arg(long)]
    pub horizon: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum ShiftCommand {
    /// Emit the weight sequence and its prefix products.
    Weights(WeightArgs),
    /// Classify return times of the ball around e_0.
    Returns {
        #[command(flatten)]
        weights: WeightArgs,
        /// Ball radius as `p/q`, in (0, 1/2).
        #[arg(long)]
        eps: Option<String>,
    },
}

#[derive(Debug, Args)]
pub struct OperatorArgs {
    /// Delta-Sidon family JSON; blocks are its flattened tuples.
    #[arg(long)]
    pub fam: Option<PathBuf>,
    /// Explicit parameter JSON, used instead of `--fam`.
    #[arg(long, conflicts_with = "fam")]
    pub params: Option<PathBuf>,
    /// Truncation dimension.
    #[arg(long)]
    pub dimension: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum BmopCommand {
    /// Emit the truncated matrix.
    Build(OperatorArgs),
    /// Emit the orbit of e_0.
    Orbit {
        #[command(flatten)]
        operator: OperatorArgs,
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Check the block identities, or the disjoint-orbit identity for (l, n).
    Verify {
        #[command(flatten)]
        operator: OperatorArgs,
        #[arg(long, requires = "n")]
        l: Option<u32>,
        #[arg(long, requires = "l")]
        n: Option<u32>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeqRule {
    /// `n_k = ⌈c k^2⌉`
    Squares,
}

#[derive(Debug, Subcommand)]
pub enum DensityCommand {
    /// Compare the difference-set density with 1/(16c).
    Report {
        #[arg(long, value_enum, default_value = "squares")]
        seq_rule: SeqRule,
        /// Growth constant as `p/q`.
        #[arg(long)]
        c: Option<String>,
        #[arg(long)]
        horizon: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Find a time in N(U,U) ∩ N(U,V) from hitting data.
    Run {
        #[arg(long, value_parser = list_arg)]
        j: Option<IntList>,
        /// Hitting data JSON: `{"in_u": window, "in_v": window}`.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Synthetic data: plant the landing pattern at `n,k`.
        #[arg(long, value_parser = list_arg, conflicts_with = "data")]
        plant: Option<IntList>,
        #[arg(long)]
        horizon: Option<u64>,
    },
    /// Select index pairs with differences 1..=n.
    Indices {
        #[arg(long, value_parser = list_arg)]
        j: Option<IntList>,
        #[arg(long)]
        n: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum ConfigCommand {
    /// Validate a config file and print it normalised.
    Check { file: PathBuf },
}

/// Where a report goes: stdout, or a temporary file renamed into place once
/// the command has finished.
pub enum Sink {
    Stdout(io::BufWriter<io::Stdout>),
    File {
        temp: tempfile::NamedTempFile,
        path: PathBuf,
    },
}

impl Sink {
    pub fn open(out: Option<&Path>) -> Result<Self, CliError> {
        match out {
            None => Ok(Sink::Stdout(io::BufWriter::new(io::stdout()))),
            Some(path) => {
                let dir = match path.parent() {
                    Some(p) if !p.as_os_str().is_empty() => p,
                    _ => Path::new("."),
                };
                Ok(Sink::File {
                    temp: tempfile::NamedTempFile::new_in(dir)?,
                    path: path.to_path_buf(),
                })
            }
        }
    }

    pub fn commit(self) -> Result<(), CliError> {
        match self {
            Sink::Stdout(mut w) => w.flush()?,
            Sink::File { mut temp, path } => {
                temp.flush()?;
                temp.persist(&path).map_err(|e| CliError::Io(e.error))?;
            }
        }
        Ok(())
    }
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> io::Result<usize> {
        match self {
            Sink::Stdout(w) => w.write(buf),
            Sink::File { temp, .. } => temp.write(buf),
        }
    }

    fn flush(&mut self) -> io::Result<()> {
        match self {
            Sink::Stdout(w) => w.flush(),
            Sink::File { temp, .. } => temp.flush(),
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return code;
        }
    };
    let error_json = cli.error_json;
    match run(&cli) {
        Ok(status) => status.exit_code(),
        Err(err) => {
            if error_json {
                println!("{}", err.to_json());
            } else {
                eprintln!("error: {err}");
            }
            err.exit_code()
        }
    }
}

/// Merges the config file, opens the sink and runs the command.
pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let out = cli.out.clone().or_else(|| config.out.clone());
    let mut sink = Sink::open(out.as_deref())?;
    let status = commands::execute(cli, &config, &mut sink)?;
    sink.commit()?;
    Ok(status)
}
