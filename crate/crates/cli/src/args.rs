use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "framethresh",
    version,
    about = "Extreme value thresholds for frame denoising"
)]
pub struct Cli {
    /// Where to write the run manifest (defaults to `<primary output>.manifest.json`).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the threshold of every rule for the given parameters.
    Thresholds(ThresholdsArgs),
    /// Threshold a noisy signal in a frame.
    Denoise(DenoiseArgs),
    /// Run a seeded Monte Carlo experiment.
    Simulate(SimulateArgs),
    /// Stability census, remainder sums and comparison bounds.
    Diagnose(DiagnoseArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

/// A command that can be recorded in a manifest and replayed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Thresholds(ThresholdsArgs),
    Denoise(DenoiseArgs),
    Simulate(SimulateArgs),
    Diagnose(DiagnoseArgs),
}

impl RunConfig {
    pub fn name(&self) -> &'static str {
        match self {
            RunConfig::Thresholds(_) => "thresholds",
            RunConfig::Denoise(_) => "denoise",
            RunConfig::Simulate(_) => "simulate",
            RunConfig::Diagnose(_) => "diagnose",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ThresholdsArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Signal length (the atom count for the universal and evt rows).
    #[arg(long)]
    pub n: usize,
    /// Number of cycle-spin shifts; adds cycle-spin rows.
    #[arg(long = "M")]
    pub shifts: Option<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    pub alpha: Vec<f64>,
    /// Wavelet filters used for the translation-invariant constant.
    #[arg(long, default_value = "cdf97")]
    pub wavelet: String,
    /// Overrides the computed translation-invariant constant.
    #[arg(long)]
    pub c: Option<f64>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRuleName {
    Universal,
    Evt,
    FromZn,
    Cyclespin,
    Ti,
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShrinkName {
    Soft,
    Hard,
    Garrote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceName {
    #[default]
    Full,
    Detail,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DenoiseArgs {
    /// Noisy signal (CSV, or raw little-endian f64 for .bin/.f64/.raw).
    #[arg(long)]
    pub input: PathBuf,
    /// Frame spec as inline JSON or a path to a JSON file.
    #[arg(long = "frame-spec")]
    pub frame_spec: String,
    #[arg(long, value_enum, default_value = "soft")]
    pub rule: ShrinkName,
    #[arg(long = "threshold-rule", value_enum, default_value = "evt")]
    pub threshold_rule: ThresholdRuleName,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    /// Noise level; required, it is never estimated.
    #[arg(long)]
    pub sigma: f64,
    /// Location parameter for `from-zn`.
    #[arg(long)]
    pub z: Option<f64>,
    /// Threshold for `fixed`.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Translation-invariant constant for `ti` (computed from the filters otherwise).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long, value_enum, default_value = "full")]
    pub subspace: SubspaceName,
    /// Clean signal; adds the mean squared error to the report.
    #[arg(long)]
    pub clean: Option<PathBuf>,
    /// Estimate output.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON report (defaults to `<output>.report.json`).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// CSV dump of the thresholded coefficients.
    #[arg(long)]
    pub coefficients: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Gumbel,
    Coverage,
    Sidak,
    Ti,
    Smoothness,
    Risk,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    #[arg(long = "frame-spec")]
    pub frame_spec: String,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value = "full")]
    pub subspace: SubspaceName,
    /// Threshold rule for `coverage`.
    #[arg(long = "threshold-rule", value_enum, default_value = "evt")]
    pub threshold_rule: ThresholdRuleName,
    /// Thresholds for `sidak`.
    #[arg(long = "T-list", value_delimiter = ',', default_value = "2.5,3,3.5")]
    pub t_list: Vec<f64>,
    /// Independent reference count for `sidak` (defaults to the distinct atom count).
    #[arg(long = "reference-m")]
    pub reference_m: Option<usize>,
    /// Gumbel locations for `ti`.
    #[arg(long = "z-list", value_delimiter = ',', default_value = "0,1,2")]
    pub z_list: Vec<f64>,
    /// Translation-invariant constant for `ti` (computed from the filters otherwise).
    #[arg(long)]
    pub c: Option<f64>,
    /// Shrinkage rule for `smoothness`.
    #[arg(long, value_enum, default_value = "soft")]
    pub rule: ShrinkName,
    /// Smoothness functional for `smoothness` as JSON.
    #[arg(long)]
    pub norm: Option<String>,
    /// Clean signal for `smoothness` and `risk`: `zero`, `piecewise`,
    /// `sparse:<count>` or a signal file.
    #[arg(long)]
    pub signal: Option<String>,
    #[arg(long)]
    pub out: PathBuf,
    /// Q-Q data for `gumbel` as CSV.
    #[arg(long)]
    pub qq: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DiagnoseArgs {
    #[arg(long = "frame-spec")]
    pub frame_spec: String,
    /// Signal lengths of the family (defaults to the spec's own length).
    #[arg(long = "n-list", value_delimiter = ',')]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long = "T-list", value_delimiter = ',', default_value = "2,3,4")]
    pub t_list: Vec<f64>,
    /// Keep repeated atoms in the census and remainder sums.
    #[arg(long = "keep-duplicates")]
    pub keep_duplicates: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    pub manifest_path: PathBuf,
    /// Write the outputs into this directory under their recorded file names.
    #[arg(long = "output-dir")]
    pub output_dir: Option<PathBuf>,
}
