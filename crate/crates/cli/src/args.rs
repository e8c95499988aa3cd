use clap::{Args, Parser, Subcommand, ValueEnum};
use mzi_qfi::Family;
use std::path::PathBuf;

pub const CEILING_ENV: &str = "MZI_QFI_CUTOFF_CEILING";

#[derive(Debug, Parser)]
#[command(
    name = "mzi-qfi",
    version,
    about = "Phase-estimation resources of two-mode interferometer probes",
    after_help = "Exit codes: 0 success, 1 usage or computation error, 2 QFI routes disagree, \
                  3 reference-table mismatch.\n\
                  The automatic cutoff ceiling defaults to 256 and can be raised with \
                  MZI_QFI_CUTOFF_CEILING."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Coherence, QFI, entanglement and sector report for one state.
    Analyze(AnalyzeArgs),
    /// Compare every family against its closed forms at one mean photon number.
    Table1(Table1Args),
    /// Evaluate one family over a parameter grid.
    #[command(after_help = "CSV columns: target,nbar,qfi,g2,g2_ab,entropy,cov_sigma_z,note\n\
                            target is the requested mean photon number (--nbar) or native parameter.\n\
                            Undefined values are empty cells.")]
    Sweep(SweepArgs),
    /// Write a probe state to a state file.
    Build(BuildArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    TwinSqueezedVacuum,
    TwinFock,
    EntangledCoherent,
    Noon,
    AmplifiedBell,
    FraternalTwinFock,
    Coherent,
    #[value(alias = "tmsv")]
    TwoModeSqueezedVacuum,
    #[value(alias = "split-fock")]
    SeparableCoherentProbe,
    FockPair,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::TwinSqueezedVacuum => Family::TwinSqueezedVacuum,
            FamilyArg::TwinFock => Family::TwinFock,
            FamilyArg::EntangledCoherent => Family::EntangledCoherent,
            FamilyArg::Noon => Family::Noon,
            FamilyArg::AmplifiedBell => Family::AmplifiedBell,
            FamilyArg::FraternalTwinFock => Family::FraternalTwinFock,
            FamilyArg::Coherent => Family::Coherent,
            FamilyArg::TwoModeSqueezedVacuum => Family::TwoModeSqueezedVacuum,
            FamilyArg::SeparableCoherentProbe => Family::SeparableCoherentProbe,
            FamilyArg::FockPair => Family::FockPair,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be positive, got {v}"))
    }
}

#[derive(Debug, Args)]
pub struct Tolerances {
    /// Absolute and relative agreement required between QFI routes.
    #[arg(long, value_parser = positive)]
    pub route_tol: Option<f64>,
    /// Path-symmetry tolerance.
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub sym_tol: f64,
    /// Separability tolerance on 1 minus the largest Schmidt coefficient.
    #[arg(long, value_parser = positive, default_value_t = 1e-9)]
    pub sep_tol: f64,
    /// Finite-difference step of the fidelity route.
    #[arg(long, value_parser = positive, default_value_t = 1e-3)]
    pub step: f64,
    /// Use a single central difference instead of Richardson extrapolation.
    #[arg(long)]
    pub raw_fd: bool,
}

/// One state, given by family parameters or a target mean photon number.
#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Photon number parameter of fixed-number families.
    #[arg(long)]
    pub n: Option<usize>,
    /// Real coherent amplitude.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Single-mode squeezing.
    #[arg(long)]
    pub xi: Option<f64>,
    /// Two-mode squeezing.
    #[arg(long)]
    pub chi: Option<f64>,
    /// Target mean photon number instead of a native parameter.
    #[arg(long)]
    pub nbar: Option<f64>,
    /// Per-mode cutoff; chosen automatically when absent.
    #[arg(long)]
    pub cutoff: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Analyze a state file instead of a factory probe.
    #[arg(long, conflicts_with = "family")]
    pub state_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, value_parser = positive, default_value_t = 4.0)]
    pub nbar: f64,
    /// Cell tolerance, relative to max(1, |prediction|).
    #[arg(long, value_parser = positive, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Target mean photon numbers.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub nbar: Vec<f64>,
    /// Native parameter grid (n, xi, chi or alpha, matching the family).
    #[arg(long, value_delimiter = ',', num_args = 1.., alias = "n", alias = "xi", alias = "chi", alias = "alpha")]
    pub param: Vec<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub tolerances: Tolerances,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}
