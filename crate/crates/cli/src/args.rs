use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entswap_core::SwapCase;

#[derive(Parser, Debug)]
#[command(name = "entswap", version, about = "Entanglement swapping of Wishart matrices: exact moments, simulation, limit laws")]
pub struct Cli {
    /// Master seed; sample i of a run uses stream (seed, i).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for CSV/JSON artifacts and manifest.json.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Format of tabular outputs.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact and limiting moments.
    #[command(subcommand)]
    Moments(MomentsCommand),
    /// Run the exhaustive identity suite.
    Verify(VerifyArgs),
    /// Sample Z, write eigenvalues and moment estimates.
    Simulate(SimulateArgs),
    /// Kolmogorov–Smirnov distance and histogram of a spectrum.
    Spectrum(SpectrumArgs),
    /// PPT statistics of induced states.
    #[command(subcommand)]
    Ppt(PptCommand),
}

#[derive(Subcommand, Debug)]
pub enum MomentsCommand {
    /// E Tr W^p as an exact fraction.
    Exact(ExactArgs),
    /// Limit of d2^-2 E Tr Z^p as a Laurent polynomial in c.
    Limit(LimitArgs),
}

#[derive(Subcommand, Debug)]
pub enum PptCommand {
    /// PPT fraction of induced states over a grid of s.
    Scan(ScanArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Indep,
    Equal,
}

impl From<CaseArg> for SwapCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Indep => SwapCase::Independent,
            CaseArg::Equal => SwapCase::Equal,
        }
    }
}

/// `--d` sets both dimensions; `--d1`/`--d2` override it. Exactly one of
/// `--s` and `--c` is allowed; `--c` gives `s = round(c·d2)`.
#[derive(Args, Debug, Clone)]
pub struct DimensionArgs {
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub d1: Option<u64>,
    #[arg(long)]
    pub d2: Option<u64>,
    #[arg(long, conflicts_with = "c")]
    pub s: Option<u64>,
    /// Ratio s/d2, as an integer, `p/q` or a decimal.
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Args, Debug)]
pub struct ExactArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::Indep)]
    pub case: CaseArg,
    #[arg(long)]
    pub p: usize,
    #[command(flatten)]
    pub dims: DimensionArgs,
    /// Largest p to enumerate (default 8 for indep, 4 for equal).
    #[arg(long)]
    pub bound: Option<usize>,
}

#[derive(Args, Debug)]
pub struct LimitArgs {
    #[arg(long)]
    pub p: usize,
    /// Evaluate exactly at this c instead of printing the polynomial.
    #[arg(long)]
    pub c: Option<String>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 6)]
    pub pmax: usize,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = CaseArg::Indep)]
    pub case: CaseArg,
    #[command(flatten)]
    pub dims: DimensionArgs,
    #[arg(long, default_value_t = 4)]
    pub pmax: usize,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum LawArg {
    #[value(name = "z_limit")]
    ZLimit,
    Semicircle,
    Mp,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Eigenvalue CSV with a `value` column (as written by `simulate`).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Only use rows with this `sample_index`.
    #[arg(long)]
    pub sample: Option<u64>,
    /// Simulate one draw instead of reading a file.
    #[arg(long, value_enum, default_value_t = CaseArg::Indep)]
    pub case: CaseArg,
    #[arg(long)]
    pub d: Option<u64>,
    #[arg(long)]
    pub d1: Option<u64>,
    #[arg(long)]
    pub d2: Option<u64>,
    #[arg(long)]
    pub s: Option<u64>,
    #[arg(long, value_enum, default_value_t = LawArg::ZLimit)]
    pub law: LawArg,
    /// Law parameter (c for z_limit, rate for mp); with inline simulation
    /// and no --s it also fixes s = round(c·d2).
    #[arg(long)]
    pub c: Option<String>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated values of s.
    #[arg(long, value_delimiter = ',', required = true)]
    pub s: Vec<usize>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}
