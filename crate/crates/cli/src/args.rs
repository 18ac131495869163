use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qss_core::schemes::{
    AbpeaConfig, BpeaConfig, McConfig, MlaeConfig, PeaConfig, QcoinConfig, SchemeConfig,
};
use qss_core::GridSize;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "qss",
    version,
    about = "Quantum-counting supersampling workbench"
)]
pub struct Cli {
    /// Master seed for every random stream.
    #[arg(long, global = true, env = "QSS_SEED", default_value_t = 42)]
    pub seed: u64,

    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Default destination of the primary output (stdout when absent).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dump the exact output distribution of PEA or quantum counting.
    Pmf(PmfArgs),
    /// Repeated single estimates at one phase.
    Estimate(EstimateArgs),
    /// Error-vs-queries sweep over a parameter ladder.
    Sweep(SweepArgs),
    /// Bias and MAE across the fraction range.
    Pattern(PatternArgs),
    /// Noisy gray-disk experiment.
    Disk(DiskArgs),
    /// HDR noise-injection pipeline on a PFM input.
    Hdr(HdrArgs),
    /// Cross-check analytic formulas against brute-force simulation.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PmfKind {
    Pea,
    Qc,
}

#[derive(Debug, Args)]
pub struct PmfArgs {
    #[arg(long, value_enum)]
    pub scheme: PmfKind,
    #[arg(long)]
    pub phi: f64,
    /// Grid size, a power of two.
    #[arg(long = "T", value_name = "T")]
    pub big_t: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeName {
    Mc,
    Pea,
    Bpea,
    Abpea,
    Mlae,
    Qcoin,
}

impl SchemeName {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Mc => "mc",
            Self::Pea => "pea",
            Self::Bpea => "bpea",
            Self::Abpea => "abpea",
            Self::Mlae => "mlae",
            Self::Qcoin => "qcoin",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        <Self as ValueEnum>::from_str(s, true).ok()
    }
}

/// Estimator flags shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct SchemeFlags {
    /// QFT grid size T (pea, bpea, abpea).
    #[arg(long = "T", value_name = "T")]
    pub big_t: Option<u64>,
    /// Number of amplification stages (mlae, qcoin).
    #[arg(long = "t", value_name = "t")]
    pub stages: Option<u32>,
    #[arg(long)]
    pub nshot: Option<u64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub nmin: Option<u64>,
    #[arg(long)]
    pub nmax: Option<u64>,
    /// Posterior mass kept between QCoin stages.
    #[arg(long)]
    pub mass: Option<f64>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, scheme: SchemeName) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("scheme {} requires --{flag}", scheme.as_str())))
}

impl SchemeFlags {
    /// Builds and validates the configuration; missing or invalid flags are
    /// usage errors.
    pub fn build(&self, scheme: SchemeName) -> Result<SchemeConfig, CliError> {
        let grid = || -> Result<GridSize, CliError> {
            GridSize::from_len(need(self.big_t, "T", scheme)?).map_err(CliError::usage)
        };
        let cfg = match scheme {
            SchemeName::Mc => SchemeConfig::Mc(McConfig {
                n_shot: need(self.nshot, "nshot", scheme)?,
            }),
            SchemeName::Pea => SchemeConfig::Pea(PeaConfig { grid: grid()? }),
            SchemeName::Bpea => SchemeConfig::Bpea(BpeaConfig {
                grid: grid()?,
                n_shot: need(self.nshot, "nshot", scheme)?,
            }),
            SchemeName::Abpea => SchemeConfig::Abpea(AbpeaConfig {
                grid: grid()?,
                alpha: need(self.alpha, "alpha", scheme)?,
                n_min: need(self.nmin, "nmin", scheme)?,
                n_max: need(self.nmax, "nmax", scheme)?,
            }),
            SchemeName::Mlae => SchemeConfig::Mlae(MlaeConfig {
                t: need(self.stages, "t", scheme)?,
                n_shot: need(self.nshot, "nshot", scheme)?,
            }),
            SchemeName::Qcoin => SchemeConfig::Qcoin(QcoinConfig {
                t: need(self.stages, "t", scheme)?,
                n_shot: need(self.nshot, "nshot", scheme)?,
                mass: self.mass.unwrap_or(QcoinConfig::DEFAULT_MASS),
            }),
        };
        cfg.validate().map_err(CliError::usage)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    /// Counting phase in [0, 1/2].
    #[arg(long)]
    pub phi: f64,
    #[command(flatten)]
    pub flags: SchemeFlags,
    #[arg(long, default_value_t = 1)]
    pub trials: u64,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep description, `key = value` lines or a flat JSON object.
    #[arg(long, conflicts_with_all = ["scheme", "ladder"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeName>,
    /// Values of the laddered parameter (T, nshot for mc, t for mlae/qcoin).
    #[arg(long, value_delimiter = ',')]
    pub ladder: Vec<u64>,
    #[command(flatten)]
    pub flags: SchemeFlags,
    #[arg(long)]
    pub n_truths: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub thresholds: Option<Vec<f64>>,
    /// Measure errors on the phase instead of the fraction.
    #[arg(long)]
    pub phase_errors: bool,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PatternArgs {
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    #[command(flatten)]
    pub flags: SchemeFlags,
    /// Spacing of the ground-truth fractions.
    #[arg(long, default_value_t = qss_core::harness::DEFAULT_PATTERN_STEP)]
    pub step: f64,
    #[arg(long, default_value_t = qss_core::harness::DEFAULT_N_TEST)]
    pub n_test: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DiskArgs {
    #[arg(long, default_value_t = qss_core::imaging::DEFAULT_DISK_SIZE)]
    pub size: usize,
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    #[command(flatten)]
    pub flags: SchemeFlags,
    /// Noisy image.
    #[arg(long)]
    pub png: Option<PathBuf>,
    /// Noise-free disk.
    #[arg(long)]
    pub reference_png: Option<PathBuf>,
    /// Diff report destination (defaults to --out, then stdout).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct HdrArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, value_enum)]
    pub scheme: SchemeName,
    #[command(flatten)]
    pub flags: SchemeFlags,
    #[arg(long, default_value_t = qss_core::imaging::DEFAULT_B)]
    pub b: u32,
    #[arg(long, default_value_t = qss_core::imaging::DEFAULT_B0)]
    pub b0: u32,
    /// Tone-mapped noisy image.
    #[arg(long)]
    pub png: Option<PathBuf>,
    /// Noisy linear-light image.
    #[arg(long)]
    pub pfm: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest number of ancilla qubits simulated.
    #[arg(long = "t", default_value_t = 8)]
    pub t: u32,
    #[arg(long, default_value_t = 50)]
    pub cases: usize,
}
