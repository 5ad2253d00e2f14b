//! Run configuration: built-in defaults, then an optional JSON file, then
//! command-line flags. `FAVARDLAB_SEED` is consulted only when neither the
//! file nor the flags set a seed.

use std::path::{Path, PathBuf};

use clap::Args;
use favardlab::{FractalSpec, RotationMode, SamplingOptions, DEFAULT_MAX_INTERVALS};
use serde::{Deserialize, Serialize};

use crate::Failure;

pub const SEED_ENV: &str = "FAVARDLAB_SEED";

/// Flags shared by every subcommand. Each one mirrors a key of the JSON
/// config file.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// Branching degree d (≥ 3)
    #[arg(long, global = true)]
    pub degree: Option<u32>,
    /// Number of generations n
    #[arg(long, global = true)]
    pub generations: Option<u32>,
    /// shared | per-node | deterministic
    #[arg(long, global = true)]
    pub mode: Option<String>,
    /// Monte Carlo sample count
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Projection angle(s), comma separated
    #[arg(
        long,
        global = true,
        value_delimiter = ',',
        allow_negative_numbers = true
    )]
    pub theta: Option<Vec<f64>>,
    /// Simpson panels over θ ∈ [0, π] for Favard lengths
    #[arg(long, global = true)]
    pub ntheta: Option<usize>,
    /// Master seed (falls back to FAVARDLAB_SEED)
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Cap on intervals per projection set (and disks per enumeration)
    #[arg(long, global = true)]
    pub max_intervals: Option<usize>,
    /// Starting midpoint count for the overlap integral
    #[arg(long, global = true)]
    pub quad_points: Option<usize>,
    /// Half-width a for the overlap check
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Interval set for the overlap check, as JSON `[[lo,hi],…]`
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub interval: Option<String>,
    /// Induction constant (default: derived c_d)
    #[arg(long, global = true)]
    pub c: Option<f64>,
    /// Level for the θ-invariance check (default: generations)
    #[arg(long, global = true)]
    pub k: Option<u32>,
    /// Input curve CSV
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file (directory for `sample`); stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// JSON config file with flat keys named like the flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    degree: Option<u32>,
    generations: Option<u32>,
    mode: Option<String>,
    samples: Option<u64>,
    theta: Option<Vec<f64>>,
    ntheta: Option<usize>,
    seed: Option<u64>,
    workers: Option<usize>,
    max_intervals: Option<usize>,
    quad_points: Option<usize>,
    a: Option<f64>,
    interval: Option<Vec<[f64; 2]>>,
    c: Option<f64>,
    k: Option<u32>,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
}

/// Resolved settings. Everything that can change a result is serialized
/// into output headers; the worker count and file paths are not, so that
/// outputs are identical across thread counts and locations.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunConfig {
    pub degree: u32,
    pub generations: u32,
    pub mode: RotationMode,
    pub samples: u64,
    pub theta: Vec<f64>,
    pub ntheta: usize,
    pub seed: u64,
    pub max_intervals: usize,
    pub quad_points: usize,
    pub a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip)]
    pub workers: usize,
    #[serde(skip)]
    pub input: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse_mode(s: &str) -> Result<RotationMode, Failure> {
    s.parse()
        .map_err(|e: favardlab::Error| Failure::Input(e.to_string()))
}

fn read_file(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &Flags) -> Result<Self, Failure> {
        let file = match &flags.config {
            Some(p) => read_file(p)?,
            None => FileConfig::default(),
        };
        let env_seed =
            match std::env::var(SEED_ENV) {
                Ok(v) => Some(v.trim().parse::<u64>().map_err(|e| {
                    Failure::Input(format!("{SEED_ENV}=`{v}` is not a u64 seed: {e}"))
                })?),
                Err(_) => None,
            };
        let mode = match flags.mode.as_deref().or(file.mode.as_deref()) {
            Some(s) => parse_mode(s)?,
            None => RotationMode::SharedRotation,
        };
        let interval = match &flags.interval {
            Some(s) => Some(serde_json::from_str(s).map_err(|e| {
                Failure::Input(format!("--interval must be JSON [[lo,hi],…]: {e}"))
            })?),
            None => file.interval,
        };
        let default_workers = std::thread::available_parallelism().map_or(1, |n| n.get());
        Ok(RunConfig {
            degree: flags.degree.or(file.degree).unwrap_or(4),
            generations: flags.generations.or(file.generations).unwrap_or(6),
            mode,
            samples: flags.samples.or(file.samples).unwrap_or(2000),
            theta: flags
                .theta
                .clone()
                .or(file.theta)
                .unwrap_or_else(|| vec![0.0]),
            ntheta: flags.ntheta.or(file.ntheta).unwrap_or(256),
            seed: flags.seed.or(file.seed).or(env_seed).unwrap_or(0),
            max_intervals: flags
                .max_intervals
                .or(file.max_intervals)
                .unwrap_or(DEFAULT_MAX_INTERVALS),
            quad_points: flags.quad_points.or(file.quad_points).unwrap_or(1024),
            a: flags.a.or(file.a).unwrap_or(0.25),
            interval,
            c: flags.c.or(file.c),
            k: flags.k.or(file.k),
            workers: flags
                .workers
                .or(file.workers)
                .unwrap_or(default_workers)
                .max(1),
            input: flags.input.clone().or(file.input),
            out: flags.out.clone().or(file.out),
        })
    }

    pub fn spec(&self) -> Result<FractalSpec, Failure> {
        Ok(FractalSpec::new(self.degree, self.generations, self.mode)?)
    }

    pub fn sampling(&self) -> SamplingOptions {
        SamplingOptions {
            workers: self.workers,
            max_intervals: self.max_intervals,
        }
    }

    pub fn single_theta(&self) -> Result<f64, Failure> {
        match self.theta.as_slice() {
            [t] => Ok(*t),
            other => Err(Failure::Input(format!(
                "this command takes exactly one --theta, got {}",
                other.len()
            ))),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
