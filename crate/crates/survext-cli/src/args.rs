//! Command-line surface and configuration resolution.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use survext::QuadratureConfig;

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "survext",
    version,
    about = "Survival-extropy measures, estimators, and uniformity tests"
)]
pub struct Cli {
    /// key=value file merged under the flags (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Seed for every stochastic phase; echoed in all outputs.
    #[arg(long, global = true, env = "SURVEXT_SEED")]
    pub seed: Option<u64>,

    /// Worker thread cap. Results are identical for any value.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Output format (default: json for single results, csv for tables).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write primary output to this file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    /// Quadrature relative tolerance.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    /// Quadrature absolute tolerance.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a population measure for parametric models.
    Measure(MeasureArgs),
    /// Plug-in estimate from data files or simulated samples.
    Estimate(EstimateArgs),
    /// Monte Carlo critical values of a uniformity statistic.
    CriticalValues(CriticalValuesArgs),
    /// Monte Carlo power study against fixed alternatives.
    Power(PowerArgs),
    /// Run a uniformity test on a data file.
    Test(TestArgs),
    /// Pairwise image classification via the inaccuracy ratio.
    ClassifyImages(ClassifyImagesArgs),
    /// Pairwise divergence analysis of grouped lifetime data.
    AnalyzeLifetimes(AnalyzeLifetimesArgs),
    /// Emit plot-ready measure curves over a parameter sweep.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// First (anchor) distribution, e.g. exp:rate=1.
    #[arg(long)]
    pub f: String,
    /// Second distribution; required by two-distribution measures.
    #[arg(long)]
    pub g: Option<String>,
    /// Measure name: Js, Jfg, SEI, Ixi, SED, SSJ, Js_t, DSEI, DSED, SSJ_t.
    #[arg(long)]
    pub name: String,
    /// Truncation age for the dynamic measures.
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// First sample file (single column or whitespace separated).
    #[arg(long, value_name = "FILE", conflicts_with = "f")]
    pub x_file: Option<PathBuf>,
    /// Second sample file.
    #[arg(long, value_name = "FILE", conflicts_with = "g")]
    pub y_file: Option<PathBuf>,
    /// Simulate the first sample from this distribution instead.
    #[arg(long)]
    pub f: Option<String>,
    /// Simulate the second sample from this distribution instead.
    #[arg(long)]
    pub g: Option<String>,
    /// Sample size per replication when simulating.
    #[arg(long)]
    pub n: Option<usize>,
    /// Replications when simulating; the mean estimate is reported.
    #[arg(long, default_value_t = 1)]
    pub reps: u64,
    /// Estimator name: Js, SED, SSJ, DSED, SSJ_t, Ixi.
    #[arg(long)]
    pub name: String,
    /// Truncation age for the dynamic estimators.
    #[arg(long)]
    pub t: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CriticalValuesArgs {
    /// Statistic: Tn, KS, AD, CM, TB, TU.
    #[arg(long)]
    pub stat: String,
    /// Sample sizes.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Significance levels.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [0.01, 0.05, 0.10])]
    pub alpha: Vec<f64>,
    /// Null replications.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Window size for TB/TU (default: round(sqrt(n) + 0.5)).
    #[arg(long)]
    pub window_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Statistics to compare.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub stat: Vec<String>,
    /// Alternative distributions, e.g. beta:a=0.5,b=1 ck:k=1.5.
    #[arg(long, required = true, num_args = 1..)]
    pub alt: Vec<String>,
    /// Sample sizes.
    #[arg(long, required = true, num_args = 1.., value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Significance levels.
    #[arg(long, num_args = 1.., value_delimiter = ',', default_values_t = [0.01, 0.05])]
    pub alpha: Vec<f64>,
    /// Replications per power cell.
    #[arg(long, default_value_t = 10_000)]
    pub reps: u64,
    /// Replications for the on-the-fly critical values.
    #[arg(long, default_value_t = 100_000)]
    pub crit_reps: u64,
    /// Window size for TB/TU (default: round(sqrt(n) + 0.5)).
    #[arg(long)]
    pub window_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Statistic: Tn, KS, AD, CM, TB, TU.
    #[arg(long)]
    pub stat: String,
    /// Sample file (single column or whitespace separated).
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Replications for the Monte Carlo critical value.
    #[arg(long, default_value_t = 100_000)]
    pub reps: u64,
    /// Window size for TB/TU (default: round(sqrt(n) + 0.5)).
    #[arg(long)]
    pub window_m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ClassifyImagesArgs {
    /// Training images CSV: label, p1, ..., p(width*height).
    #[arg(long, value_name = "FILE")]
    pub train: PathBuf,
    /// Test images CSV, same layout.
    #[arg(long, value_name = "FILE")]
    pub test: PathBuf,
    #[arg(long)]
    pub width: usize,
    #[arg(long)]
    pub height: usize,
    /// Anchor class label scores are computed against.
    #[arg(long)]
    pub anchor: String,
    /// The two labels to classify, e.g. --pair 1 4.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub pair: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeLifetimesArgs {
    /// Lifetime records CSV.
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,
    /// Column holding the group label.
    #[arg(long, default_value = "group")]
    pub group_column: String,
    /// Column holding the lifetime value.
    #[arg(long, default_value = "lifetime")]
    pub lifetime_column: String,
    /// Truncation ages for additional dynamic divergence sections.
    #[arg(long, num_args = 0.., value_delimiter = ',')]
    pub t: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Fixed rate of the first exponential.
    #[arg(long, default_value_t = 1.0)]
    pub lambda1: f64,
    /// Sweep start for the second exponential's rate.
    #[arg(long, default_value_t = 0.1)]
    pub lambda2_min: f64,
    /// Sweep end.
    #[arg(long, default_value_t = 5.0)]
    pub lambda2_max: f64,
    /// Number of sweep points.
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
}

/// Fully resolved run configuration, embedded in every output so any
/// emitted number can be traced to the decisions that produced it.
#[derive(Debug, Clone, Serialize)]
pub struct ResolvedConfig {
    pub tool_version: &'static str,
    pub seed: u64,
    pub threads: Option<usize>,
    pub format: Format,
    pub relative_tolerance: f64,
    pub absolute_tolerance: f64,
    /// Convention notes fixed by this tool.
    pub gompertz_parameterization: &'static str,
    pub cm_square_correction: bool,
}

impl ResolvedConfig {
    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig {
            relative_tolerance: self.relative_tolerance,
            absolute_tolerance: self.absolute_tolerance,
            ..QuadratureConfig::default()
        }
    }
}

/// Values accepted from the key=value config file.
#[derive(Debug, Default)]
struct FileConfig {
    seed: Option<u64>,
    threads: Option<usize>,
    format: Option<Format>,
    rel_tol: Option<f64>,
    abs_tol: Option<f64>,
}

fn parse_config_file(text: &str) -> Result<FileConfig, CliError> {
    let mut cfg = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| CliError::Usage(format!("config line {}: bad {what}", lineno + 1));
        match key {
            "seed" => cfg.seed = Some(value.parse().map_err(|_| bad("seed"))?),
            "threads" => cfg.threads = Some(value.parse().map_err(|_| bad("threads"))?),
            "format" => {
                cfg.format = Some(match value.to_ascii_lowercase().as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(bad("format")),
                })
            }
            "rel_tol" | "relative_tolerance" => {
                cfg.rel_tol = Some(value.parse().map_err(|_| bad("rel_tol"))?)
            }
            "abs_tol" | "absolute_tolerance" => {
                cfg.abs_tol = Some(value.parse().map_err(|_| bad("abs_tol"))?)
            }
            _ => return Err(CliError::Usage(format!("config: unknown key `{key}`"))),
        }
    }
    Ok(cfg)
}

impl Cli {
    /// Merge flags over the config file over the defaults.
    pub fn resolve(&self, default_format: Format) -> Result<ResolvedConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| {
                    CliError::Data(format!("cannot read config `{}`: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => FileConfig::default(),
        };
        let defaults = QuadratureConfig::default();
        Ok(ResolvedConfig {
            tool_version: env!("CARGO_PKG_VERSION"),
            seed: self.seed.or(file.seed).unwrap_or(0),
            threads: self.threads.or(file.threads),
            format: self.format.or(file.format).unwrap_or(default_format),
            relative_tolerance: self
                .rel_tol
                .or(file.rel_tol)
                .unwrap_or(defaults.relative_tolerance),
            absolute_tolerance: self
                .abs_tol
                .or(file.abs_tol)
                .unwrap_or(defaults.absolute_tolerance),
            gompertz_parameterization: "survival(x) = exp(-(a/b)(exp(bx) - 1))",
            cm_square_correction: true,
        })
    }
}
