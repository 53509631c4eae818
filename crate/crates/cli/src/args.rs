use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "extbeam",
    version,
    about = "Extensible beam on a viscoelastic foundation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "command")]
pub enum Command {
    /// Critical loads and resonance at a foundation stiffness
    Critical(CriticalArgs),
    /// Stationary states of the unloaded beam
    Stationary(StationaryArgs),
    /// Integrate an orbit and record its energy ledger
    Simulate(SimulateArgs),
    /// Exponential decay rate of the energy along an orbit
    Decay(DecayArgs),
    /// Which equilibrium an orbit (or an ensemble) settles on
    Basin(BasinArgs),
    /// Stability classification over a (k, beta) grid
    Map(MapArgs),
    /// Static response of the buckled branches against beta
    Bifurcation(BifurcationArgs),
    /// Re-run a command from its manifest
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Critical(_) => "critical",
            Command::Stationary(_) => "stationary",
            Command::Simulate(_) => "simulate",
            Command::Decay(_) => "decay",
            Command::Basin(_) => "basin",
            Command::Map(_) => "map",
            Command::Bifurcation(_) => "bifurcation",
            Command::Replay(_) => "replay",
        }
    }

    pub fn out_mut(&mut self) -> Option<&mut Option<PathBuf>> {
        match self {
            Command::Stationary(a) => Some(&mut a.out),
            Command::Simulate(a) => Some(&mut a.run.out),
            Command::Decay(a) => Some(&mut a.run.out),
            Command::Basin(a) => Some(&mut a.run.out),
            Command::Map(a) => Some(&mut a.out),
            Command::Bifurcation(a) => Some(&mut a.out),
            Command::Critical(_) | Command::Replay(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CriticalArgs {
    /// Foundation stiffness k ≥ 0
    #[arg(long, allow_hyphen_values = true)]
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BeamArgs {
    /// Axial coefficient beta (negative compresses)
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "load",
        conflicts_with = "load"
    )]
    pub beta: Option<f64>,
    /// Axial load P, meaning beta = -P
    #[arg(long, allow_hyphen_values = true)]
    pub load: Option<f64>,
    /// Foundation stiffness
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub k: f64,
    /// Damping constant
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub delta: f64,
    /// Sine coefficients f_1, f_2, ... of the lateral load
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub f_modes: Vec<f64>,
}

impl BeamArgs {
    pub fn beta(&self) -> f64 {
        self.beta.or(self.load.map(|p| -p)).unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct StationaryArgs {
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Output prefix; writes PREFIX.csv (or PREFIX.json) and PREFIX.manifest.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RunArgs {
    #[command(flatten)]
    pub beam: BeamArgs,
    /// Retained sine modes
    #[arg(long, default_value_t = 16)]
    pub modes: usize,
    /// Initial modal amplitudes
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub a: Vec<f64>,
    /// Initial modal velocities
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub v: Vec<f64>,
    /// Random initial data on an energy sphere in the first four modes
    #[arg(long, conflicts_with_all = ["a", "v"])]
    pub random: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Energy ‖u‖₂² + ‖v‖² of random initial data
    #[arg(long, default_value_t = 1.0)]
    pub energy: f64,
    #[arg(long, default_value_t = 200.0)]
    pub t_end: f64,
    /// Sampling interval
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
    /// Absolute tolerance; ℰ is not resolved much below its square
    #[arg(long)]
    pub abs_tol: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub max_step: f64,
    /// The ε in Φ_ε; defaults to min(1, k, δ)/2
    #[arg(long)]
    pub eps_phi: Option<f64>,
    /// Output prefix for CSV files and PREFIX.manifest.json
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct DecayArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Trailing fraction of the samples used for the fit
    #[arg(long, default_value_t = 0.5)]
    pub window: f64,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BasinArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Ensemble size for random initial data
    #[arg(long, default_value_t = 1)]
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct MapArgs {
    /// beta grid as min:max:count
    #[arg(long, allow_hyphen_values = true)]
    pub beta: GridRange,
    /// k grid as min:max:count
    #[arg(long, allow_hyphen_values = true)]
    pub k: GridRange,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct BifurcationArgs {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub k: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_min: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
    /// Write to this prefix instead of the recorded one
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRange {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl FromStr for GridRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, count] = parts[..] else {
            return Err(format!("expected min:max:count, got `{s}`"));
        };
        let min: f64 = min.parse().map_err(|e| format!("bad min `{min}`: {e}"))?;
        let max: f64 = max.parse().map_err(|e| format!("bad max `{max}`: {e}"))?;
        let count: usize = count
            .parse()
            .map_err(|e| format!("bad count `{count}`: {e}"))?;
        if !(min.is_finite() && max.is_finite()) || min > max {
            return Err(format!("need finite min ≤ max, got {min}:{max}"));
        }
        if count == 0 || (count == 1 && min != max) {
            return Err(format!("count {count} cannot span {min}:{max}"));
        }
        Ok(Self { min, max, count })
    }
}

impl fmt::Display for GridRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.min, self.max, self.count)
    }
}
