//! `sg2` — command-line driver for the separable finite-gap sine-Gordon
//! toolkit.
//!
//! Subcommands:
//! - `eval`: sample a solution family on a space-time grid, write the grid
//!   (CSV or JSON) and print a metadata report.
//! - `periods`: compute period data and involution-relation residuals for a
//!   spectrum, write a JSON report.
//! - `verify`: run the verification suites, write a pass/fail JSON report.
//! - `floquet-scan`: scan the Floquet discriminant of a test potential over
//!   an energy grid, write a CSV table.
//!
//! Exit codes: 0 success, 1 numerical or verification failure, 2 invalid
//! input (bad flags, bad config, parameters outside their domains).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sg2_core::floquet::FloquetError;
use sg2_core::periods::PeriodsError;
use sg2_core::solutions::SolutionsError;
use sg2_core::spectral::SpectralError;

#[derive(Parser, Debug)]
#[command(name = "sg2", version, about = "Separable finite-gap sine-Gordon toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Output file path (data commands default to a command-specific name).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format for data files.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Residual tolerance used for pass/fail decisions.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomized checks (identical seed => identical output).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Plain `key=value` config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a solution on a grid and write it with metadata.
    Eval(EvalArgs),
    /// Compute periods and relation residuals for one spectrum.
    Periods(PeriodsArgs),
    /// Run the verification suites and report per-check residuals.
    Verify(VerifyArgs),
    /// Scan the Floquet discriminant over an energy grid.
    FloquetScan(ScanArgs),
}

#[derive(Args, Debug, Clone, Default)]
struct EvalArgs {
    /// Solution family: kink-a | breather-a | kink-b | breather-b.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    params: SpectrumParams,
    /// Grid size as `NXxNT` (default 101x101).
    #[arg(long)]
    grid: Option<String>,
    /// Spatial half-width of the grid (default 5).
    #[arg(long)]
    x_max: Option<f64>,
    /// Temporal half-width of the grid (default 5).
    #[arg(long)]
    t_max: Option<f64>,
    /// Field scale: a number, or `calibrate` to search for it.
    #[arg(long = "C")]
    c_scale: Option<String>,
    /// Evaluation route: closed | theta.
    #[arg(long)]
    route: Option<String>,
}

/// Spectrum parameters shared by `eval` and `periods`; which subset is
/// required depends on the family.
#[derive(Args, Debug, Clone, Default)]
struct SpectrumParams {
    /// Radius parameter (case-a families).
    #[arg(long)]
    r: Option<f64>,
    /// Cut half-length (case-a kink).
    #[arg(long)]
    eta: Option<f64>,
    /// Branch-point angle (case-a breather).
    #[arg(long)]
    phi: Option<f64>,
    /// Outer exponent (case-b kink), must exceed --eta2.
    #[arg(long)]
    eta1: Option<f64>,
    /// Inner exponent (case-b kink).
    #[arg(long)]
    eta2: Option<f64>,
    /// Lower angle (case-b breather), must be below --phi2.
    #[arg(long)]
    phi1: Option<f64>,
    /// Upper angle (case-b breather).
    #[arg(long)]
    phi2: Option<f64>,
}

#[derive(Args, Debug, Clone, Default)]
struct PeriodsArgs {
    /// Spectrum labelling: a | b.
    #[arg(long)]
    case: Option<String>,
    /// Solution kind: kink | breather.
    #[arg(long)]
    kind: Option<String>,
    #[command(flatten)]
    params: SpectrumParams,
}

#[derive(Args, Debug, Clone, Default)]
struct VerifyArgs {
    /// Run only suites whose name contains this substring.
    #[arg(long)]
    filter: Option<String>,
}

#[derive(Args, Debug, Clone, Default)]
struct ScanArgs {
    /// Test potential: free | even | odd.
    #[arg(long)]
    potential: Option<String>,
    /// Amplitude of the even cosine potential.
    #[arg(long)]
    a: Option<f64>,
    /// Slope of the odd winding potential.
    #[arg(long)]
    eps: Option<f64>,
    /// Spatial period of the potential.
    #[arg(long)]
    l: Option<f64>,
    /// Lower end of the energy grid.
    #[arg(long)]
    e_min: Option<f64>,
    /// Upper end of the energy grid.
    #[arg(long)]
    e_max: Option<f64>,
    /// Number of energy samples.
    #[arg(long)]
    n: Option<usize>,
    /// Energy spacing: log | linear.
    #[arg(long)]
    spacing: Option<String>,
}

/// A structured failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub name: String,
    pub message: String,
}

impl CliError {
    /// Invalid input: bad flags, malformed config, out-of-domain parameters.
    pub fn usage(name: &str, message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            name: name.to_string(),
            message: message.into(),
        }
    }

    /// Internal numerical failure (quadrature, series, integrator).
    pub fn numerical(name: &str, message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            name: name.to_string(),
            message: message.into(),
        }
    }

    /// A verification ran to completion but its residuals exceed tolerance.
    pub fn verification(message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            name: "VerificationFailed".to_string(),
            message: message.into(),
        }
    }
}

pub fn spectral_error(e: SpectralError) -> CliError {
    let name = match &e {
        SpectralError::ParamOutOfRange(_) => "ParamOutOfRange",
        SpectralError::DegenerateSpectrum(_) => "DegenerateSpectrum",
        SpectralError::CutsOverlap { .. } => "CutsOverlap",
        SpectralError::ZeroEnergy => "ZeroEnergy",
        SpectralError::CaseMismatch(_) => "CaseMismatch",
    };
    CliError::usage(name, e.to_string())
}

pub fn periods_error(e: PeriodsError) -> CliError {
    match &e {
        PeriodsError::QuadratureNoConvergence(_) => {
            CliError::numerical("QuadratureNoConvergence", e.to_string())
        }
        PeriodsError::BranchTrackingFailure(_) => {
            CliError::numerical("BranchTrackingFailure", e.to_string())
        }
        PeriodsError::CalibrationFailed { .. } => {
            CliError::numerical("CalibrationFailed", e.to_string())
        }
        PeriodsError::UnsupportedFamily(_) => CliError::usage("UnsupportedFamily", e.to_string()),
        PeriodsError::Elliptic(_) => CliError::numerical("Elliptic", e.to_string()),
        PeriodsError::Spectral(inner) => spectral_error(inner.clone()),
    }
}

pub fn solutions_error(e: SolutionsError) -> CliError {
    match &e {
        SolutionsError::ThetaZero { .. } => CliError::numerical("ThetaZero", e.to_string()),
        SolutionsError::GridTooCoarse(_) => CliError::usage("GridTooCoarse", e.to_string()),
        SolutionsError::SpectraMismatch(_) => CliError::usage("SpectraMismatch", e.to_string()),
        SolutionsError::ParamOutOfRange(_) => CliError::usage("ParamOutOfRange", e.to_string()),
        SolutionsError::Elliptic(_) => CliError::numerical("Elliptic", e.to_string()),
        SolutionsError::Periods(inner) => periods_error(inner.clone()),
        SolutionsError::Spectral(inner) => spectral_error(inner.clone()),
    }
}

pub fn floquet_error(e: FloquetError) -> CliError {
    match &e {
        FloquetError::ZeroEnergy => CliError::usage("ZeroEnergy", e.to_string()),
        FloquetError::IntegratorTolExceeded { .. } => {
            CliError::numerical("IntegratorTolExceeded", e.to_string())
        }
        FloquetError::ParityUntagged => CliError::usage("ParityUntagged", e.to_string()),
        FloquetError::PotentialInvalid(_) => CliError::usage("PotentialInvalid", e.to_string()),
        FloquetError::AnalyticContinuationUnavailable(_) => {
            CliError::usage("AnalyticContinuationUnavailable", e.to_string())
        }
        FloquetError::Elliptic(_) => CliError::numerical("Elliptic", e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {}", e.name, e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = config::load(cli.common.config.as_deref())?;
    match cli.command {
        Command::Eval(args) => commands::cmd_eval(args, &cli.common, &cfg),
        Command::Periods(args) => commands::cmd_periods(args, &cli.common, &cfg),
        Command::Verify(args) => commands::cmd_verify(args, &cli.common, &cfg),
        Command::FloquetScan(args) => commands::cmd_floquet_scan(args, &cli.common, &cfg),
    }
}
