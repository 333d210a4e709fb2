use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "gnl", version, about = "Neumann spectra of the Ornstein-Uhlenbeck operator in Gauss space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the report here (atomically) instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; CSV for sweep and lemmas, JSON otherwise by default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Command-specific tolerance (see README).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// μ₁ of origin-centered balls over a range of radii.
    Sweep(SweepArgs),
    /// Lowest Neumann eigenvalues of one domain.
    Spectrum(SpectrumArgs),
    /// Full verification record of the harmonic-mean inequality for one domain.
    Verify(VerifyArgs),
    /// Monotonicity, lower-bound, profile-sign and rearrangement checks over grids.
    Lemmas(LemmasArgs),
}

#[derive(Debug, Args)]
pub struct RangeArgs {
    /// Explicit radii (comma separated or repeated); overrides the range.
    #[arg(long = "R", value_delimiter = ',')]
    pub radii: Vec<f64>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub range: RangeArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainKind {
    Ball,
    Annulus,
    Ellipse,
    Rectangle,
    Polygon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum BackendArg {
    #[default]
    Auto,
    Radial,
    Fem,
}

#[derive(Debug, Args)]
pub struct DomainArgs {
    #[arg(long, value_enum)]
    pub domain: Option<DomainKind>,
    /// Ball radius.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Annulus inner radius.
    #[arg(long)]
    pub r1: Option<f64>,
    /// Annulus outer radius.
    #[arg(long)]
    pub r2: Option<f64>,
    /// Ellipse semi-axis or rectangle half-width along x.
    #[arg(long)]
    pub a: Option<f64>,
    /// Ellipse semi-axis or rectangle half-height along y.
    #[arg(long)]
    pub b: Option<f64>,
    /// Polygon vertices as "x,y;x,y;...", counter-clockwise.
    #[arg(long, allow_hyphen_values = true)]
    pub vertices: Option<String>,
    /// JSON domain description; replaces the other domain flags.
    #[arg(long)]
    pub domain_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub domain: DomainArgs,
    /// Number of entries (distinct modes) to report.
    #[arg(long, default_value_t = 6)]
    pub count: usize,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    /// Finite-element mesh size.
    #[arg(long)]
    pub h: Option<f64>,
    /// Write the finite-element mesh in text form to this file.
    #[arg(long)]
    pub mesh_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub domain: DomainArgs,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[arg(long)]
    pub h: Option<f64>,
    /// JSON file with μ₁..μ_m to use instead of the solver's values.
    #[arg(long)]
    pub spectrum_override: Option<PathBuf>,
    #[arg(long)]
    pub mesh_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LemmasArgs {
    /// Dimensions (comma separated or repeated).
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
    pub m: Vec<usize>,
    #[command(flatten)]
    pub range: RangeArgs,
    /// Number of random step functions for the rearrangement check.
    #[arg(long, default_value_t = 20)]
    pub count: usize,
    /// Add a rearrangement check with the increasing h(r) = r.
    #[arg(long)]
    pub inject_increasing: bool,
}
