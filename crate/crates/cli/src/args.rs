use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "rkms", version, about = "KMS states and conformal measures of rational maps")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct GlobalArgs {
    /// Rational map in `z`, e.g. `z^2 - 2` or `l*(1 - 2/z)^2`.
    #[arg(long, global = true, default_value = "z^2")]
    pub map: String,
    /// Parameter binding `NAME=VALUE`, repeatable.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// `flat`, `chordal`, or `weighted:<expr>` (chordal metric scaled by |expr|).
    #[arg(long, global = true)]
    pub metric: Option<String>,
    /// Tree or series depth; each command has its own default.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Forward-orbit horizon.
    #[arg(long, global = true, default_value_t = 400)]
    pub horizon: usize,
    /// Orbit return tolerance, also the root-finding tolerance.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Assert the Collet-Eckmann condition.
    #[arg(long, global = true)]
    pub assume_ce: bool,
    /// Assert (or with `=false` deny) that critical points are pre-periodic.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true", value_name = "BOOL")]
    pub assume_preperiodic_critical: Option<bool>,
    /// Assert that the Julia set is the whole sphere.
    #[arg(long, global = true)]
    pub julia_is_sphere: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
    Png,
    /// Binary point cloud (`measure` only).
    Cloud,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Orbit, cycle, isotropy and consistency of one point.
    Classify {
        /// A complex number such as `0.3+0.1i`, or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Extremal KMS states for a list of inverse temperatures.
    Census {
        /// Comma-separated values; `logd` stands for the log of the degree.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
        beta: Vec<String>,
        /// `gauge`, `conformal`, or `potential:<expr>` (real part of expr).
        #[arg(long, default_value = "gauge")]
        action: String,
        /// Keep every atom of the atomic measures in the report.
        #[arg(long)]
        full: bool,
    },
    /// Conformal extremal-state counts over a grid of inverse temperatures.
    PhaseDiagram {
        #[arg(long, allow_hyphen_values = true)]
        beta_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta_max: f64,
        #[arg(long, default_value_t = 41)]
        steps: usize,
        /// Also write the plot to this file.
        #[arg(long)]
        #[serde(skip)]
        plot: Option<PathBuf>,
    },
    /// Picture of the Julia set.
    Julia {
        #[arg(long, default_value_t = 512)]
        resolution: u32,
        /// Half-width of the square view centred at 0.
        #[arg(long)]
        radius: Option<f64>,
        /// Points plotted by inverse iteration (rational maps).
        #[arg(long, default_value_t = 200_000)]
        points: usize,
    },
    /// Pressure curve and the root of Bowen's equation.
    Pressure {
        /// Comma-separated exponents.
        #[arg(
            long,
            allow_hyphen_values = true,
            value_delimiter = ',',
            default_value = "0,0.5,1,1.5,2"
        )]
        delta: Vec<f64>,
    },
    /// Discretized Lyubich measure or conformal eigenmeasure.
    Measure {
        #[arg(long, value_enum, default_value = "lyubich")]
        kind: MeasureChoice,
        /// Exponent of the eigenmeasure; the Bowen root when absent.
        #[arg(long)]
        delta: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureChoice {
    Lyubich,
    Eigen,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Census { .. } => "census",
            Command::PhaseDiagram { .. } => "phase-diagram",
            Command::Julia { .. } => "julia",
            Command::Pressure { .. } => "pressure",
            Command::Measure { .. } => "measure",
        }
    }
}
