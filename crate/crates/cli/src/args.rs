//! Command-line interface definition and flag validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "locpoly",
    version,
    about = "Local polynomial regression: fits, equivalent kernels, kernel classification, \
             representability decomposition, and weighting-equivalence reports"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate a derivative of the regression function at one point
    Fit(FitArgs),
    /// Evaluate the fit over a grid of estimation points
    Curve(CurveArgs),
    /// Export the equivalent kernel and factor polynomial as JSON
    Kernel(KernelArgs),
    /// Check a kernel file against the moment conditions and count sign changes
    Classify(ClassifyArgs),
    /// Recover non-negative fit weights from a kernel file
    Decompose(DecomposeArgs),
    /// Compare the linear and quadratic weightings on a design
    Symmetry(SymmetryArgs),
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Two-column CSV of (x, y) samples
    #[arg(long)]
    pub input: PathBuf,
    /// Estimation point
    #[arg(long)]
    pub t: f64,
    /// Derivative order
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Moment order (local polynomial degree + 1)
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Bandwidth; defaults to the largest |x_i - t|
    #[arg(long)]
    pub h: Option<f64>,
    /// Weight scheme: uniform|linear-minus|linear-plus|quadratic|table:<path>
    #[arg(long, default_value = "quadratic")]
    pub weight: String,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Two-column CSV of (x, y) samples
    #[arg(long)]
    pub input: PathBuf,
    /// Evaluation grid as start:stop:count
    #[arg(long)]
    pub grid: String,
    /// Derivative order
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Moment order
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Bandwidth; defaults to the largest |x_i - t| per grid point
    #[arg(long)]
    pub h: Option<f64>,
    /// Weight scheme: uniform|linear-minus|linear-plus|quadratic|table:<path>
    #[arg(long, default_value = "quadratic")]
    pub weight: String,
    /// Output format
    #[arg(long, default_value = "json")]
    pub format: String,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Two-column CSV; only the x column defines the design
    #[arg(long)]
    pub input: PathBuf,
    /// Estimation point
    #[arg(long)]
    pub t: f64,
    /// Derivative order
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Moment order
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Bandwidth; defaults to the largest |x_i - t|
    #[arg(long)]
    pub h: Option<f64>,
    /// Weight scheme: uniform|linear-minus|linear-plus|quadratic|table:<path>
    #[arg(long, default_value = "quadratic")]
    pub weight: String,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Kernel JSON file (the schema the kernel subcommand emits)
    #[arg(long)]
    pub input: PathBuf,
    /// Tolerance for the normalized moment-condition test
    #[arg(long, default_value_t = locpoly::DEFAULT_MOMENT_TOL)]
    pub moment_tol: f64,
    /// Relative threshold for classifying kernel values as zero
    #[arg(long, default_value_t = locpoly::DEFAULT_ZERO_TOL_REL)]
    pub zero_tol: f64,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Kernel JSON file (the schema the kernel subcommand emits)
    #[arg(long)]
    pub input: PathBuf,
    /// Tolerance for the moment-condition pre-check
    #[arg(long, default_value_t = locpoly::DEFAULT_MOMENT_TOL)]
    pub moment_tol: f64,
    /// Relative threshold for classifying kernel values as zero
    #[arg(long, default_value_t = locpoly::DEFAULT_ZERO_TOL_REL)]
    pub zero_tol: f64,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SymmetryArgs {
    /// Optional CSV whose x column supplies the design; otherwise built
    /// symmetric from --half-count
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Points per side when building a symmetric design
    #[arg(long)]
    pub half_count: Option<usize>,
    /// Omit the center point of the built design
    #[arg(long)]
    pub no_center: bool,
    /// Estimation point
    #[arg(long, default_value_t = 0.0)]
    pub t: f64,
    /// Bandwidth
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    /// Derivative order
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Moment order
    #[arg(long, default_value_t = 2)]
    pub p: usize,
    /// Tolerance for the kernel-equality verdict, relative to kernel magnitude
    #[arg(long, default_value_t = locpoly::DEFAULT_EQUALITY_TOL)]
    pub equality_tol: f64,
    /// Write the result here instead of standard output
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// Weight flag, parsed but with any table file loaded later.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightArg {
    Uniform,
    LinearMinus,
    LinearPlus,
    Quadratic,
    Table(PathBuf),
}

pub fn parse_weight(text: &str) -> Result<WeightArg, CliError> {
    match text {
        "uniform" => Ok(WeightArg::Uniform),
        "linear-minus" => Ok(WeightArg::LinearMinus),
        "linear-plus" => Ok(WeightArg::LinearPlus),
        "quadratic" => Ok(WeightArg::Quadratic),
        other => match other.strip_prefix("table:") {
            Some(path) if !path.is_empty() => Ok(WeightArg::Table(PathBuf::from(path))),
            _ => Err(CliError::usage(format!(
                "--weight: unknown scheme \"{other}\" (expected uniform|linear-minus|linear-plus|quadratic|table:<path>)"
            ))),
        },
    }
}

/// Validate the q/p pair shared by the fitting subcommands.
pub fn check_orders(q: usize, p: usize) -> Result<(), CliError> {
    if p == 0 || p > locpoly::MAX_MOMENT_ORDER {
        return Err(CliError::usage(format!(
            "--p must be in 1..={}, got {p}",
            locpoly::MAX_MOMENT_ORDER
        )));
    }
    if q >= p {
        return Err(CliError::usage(format!(
            "--q must be less than --p, got q={q}, p={p}"
        )));
    }
    Ok(())
}

pub fn check_bandwidth(h: Option<f64>) -> Result<(), CliError> {
    if let Some(h) = h {
        if h <= 0.0 || !h.is_finite() {
            return Err(CliError::usage(format!("--h must be positive, got {h}")));
        }
    }
    Ok(())
}

/// Parse a start:stop:count grid specification.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::usage(format!("--grid expects start:stop:count, got \"{text}\""));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].parse().map_err(|_| bad())?;
    let count: usize = parts[2].parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() {
        return Err(bad());
    }
    if count == 0 {
        return Err(CliError::usage("--grid count must be at least 1".to_string()));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let step = (stop - start) / (count - 1) as f64;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}
