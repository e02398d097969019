//! Command-line front end for wavemix-core.
//!
//! Parameters come from flags, then from an optional JSON config file, then
//! from built-in defaults (omega01 = 10, gamma = 1, v = 1), in that order of
//! precedence.

pub mod commands;
pub mod emit;
pub mod sweep;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavemix_core::RawConfig;

use crate::emit::Format;

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] wavemix_core::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} of {1} checks failed")]
    Verify(usize, usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) if e.is_validation() => EXIT_VALIDATION,
            CliError::Core(_) | CliError::Io(_) | CliError::Verify(..) => EXIT_NUMERICAL,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "wavemix", version, about = "Wave-mixing spectra of a bichromatically driven two-level scatterer")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form side-peak amplitudes of the classical-field theory.
    Semiclassical(SemiclassicalArgs),
    /// Side peaks from direct integration of the Bloch equations.
    Oracle(OracleArgs),
    /// Side-peak amplitudes for coherent-state inputs.
    Quantum(QuantumArgs),
    /// Table of the loop coefficients gamma.
    Gamma(GammaArgs),
    /// Momentum distribution of two A photons scattered with and without two B photons.
    Example222(Example222Args),
    /// Run every acceptance check and invariant.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON config file with any of omega01, gamma, v, rabi_a, rabi_b, delta.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Parameter sweep `name=start:stop:count`.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub omega01: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rabi_a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub rabi_b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub delta: Option<f64>,
}

impl Common {
    fn flags(&self) -> RawConfig {
        RawConfig {
            omega01: self.omega01,
            gamma: self.gamma,
            v: self.v,
            rabi_a: self.rabi_a,
            rabi_b: self.rabi_b,
            delta: self.delta,
        }
    }

    /// Flags over config file over defaults.
    pub fn resolve(&self) -> CliResult<RawConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                RawConfig::from_json(&text)?
            }
            None => RawConfig::default(),
        };
        let defaults = RawConfig { omega01: Some(10.0), gamma: Some(1.0), v: Some(1.0), ..RawConfig::default() };
        Ok(self.flags().or(file).or(defaults))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SemiclassicalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Highest p; peaks p = 0..=orders on both sides.
    #[arg(long, default_value_t = 3)]
    pub orders: u32,
    /// Use the leading weak-drive form instead of the full closed form.
    #[arg(long)]
    pub weak: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 3)]
    pub orders: u32,
    /// Settling periods (default: enough for 10/gamma and at least three).
    #[arg(long)]
    pub settle_periods: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub record_periods: usize,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-9)]
    pub rel_tol: f64,
    /// Also write the recorded trajectory as CSV here.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    E,
    T,
    R,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SourceArg {
    Published,
    Computed,
}

#[derive(Debug, Clone, Args)]
pub struct QuantumArgs {
    #[command(flatten)]
    pub common: Common,
    /// Mean photon number of mode A.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha2: Option<f64>,
    /// Mean photon number of mode B.
    #[arg(long, allow_negative_numbers = true)]
    pub beta2: Option<f64>,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub phase_a: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub phase_b: f64,
    /// Highest p; rows p = 1..=p_max.
    #[arg(long, default_value_t = 2)]
    pub p_max: u32,
    #[arg(long, value_enum, default_value_t = ChannelArg::All)]
    pub channel: ChannelArg,
    #[arg(long, value_enum, default_value_t = SourceArg::Published)]
    pub source: SourceArg,
    #[arg(long, allow_negative_numbers = true, default_value_t = 1e-12)]
    pub tail_bound: f64,
    /// Spectators pass with unit amplitude instead of the single-photon
    /// coefficients at the drive momenta.
    #[arg(long)]
    pub unit_coefficients: bool,
}

#[derive(Debug, Clone, Args)]
pub struct GammaArgs {
    #[arg(long, short, default_value_t = 3)]
    pub p_max: u32,
    #[arg(long, value_enum, default_value_t = SourceArg::Published)]
    pub source: SourceArg,
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct Example222Args {
    #[command(flatten)]
    pub common: Common,
    /// Lorentzian half width in k (default: a fifth of |k_a − k_b|).
    #[arg(long, allow_negative_numbers = true)]
    pub linewidth: Option<f64>,
    #[arg(long, default_value_t = 4001)]
    pub points: usize,
    /// Grid extension beyond the peaks, in linewidths.
    #[arg(long, allow_negative_numbers = true, default_value_t = 10.0)]
    pub margin: f64,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Writes to the file if given, otherwise to standard output.
pub fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("wavemix: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("see `wavemix --help` for usage");
            }
            e.exit_code()
        }
    }
}
