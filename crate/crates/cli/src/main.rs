//! `favardlab` command-line driver.
//!
//! Exit codes: 0 success or passed check, 1 I/O failure, 2 failed check,
//! 3 resource limit, 4 invalid input or malformed data.

mod commands;
mod config;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{Flags, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "favardlab",
    version,
    about = "Projection and Favard lengths of random disk Cantor sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write one realization: disks.json and projection.json under --out
    Sample,
    /// Estimate E_1..E_n at one projection angle, as CSV
    Curve,
    /// Estimate expected Favard lengths for levels 1..n, as CSV
    Favard,
    /// Run a numerical check and write a JSON verdict
    Verify {
        #[arg(value_enum)]
        which: Check,
    },
    /// Fit decay models to a curve CSV (--input)
    Fit,
    /// Draw a curve CSV (--input) as a log–log SVG
    Plot,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Check {
    Overlap,
    Induction,
    Theta,
    Mattila,
}

pub enum Outcome {
    Done,
    VerificationFailed,
}

#[derive(Debug)]
pub enum Failure {
    Io(String),
    Resource(String),
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Resource(_) => 3,
            Failure::Input(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Io(m) | Failure::Resource(m) | Failure::Input(m) => m,
        }
    }
}

impl From<favardlab::Error> for Failure {
    fn from(e: favardlab::Error) -> Self {
        use favardlab::Error as E;
        match e {
            E::ResourceLimit { .. } => Failure::Resource(e.to_string()),
            E::Io(_) | E::ThreadPool(_) => Failure::Io(e.to_string()),
            E::InvalidInput(_)
            | E::UnsupportedMode { .. }
            | E::LayoutOverflow(_)
            | E::Data(_)
            | E::Csv(_)
            | E::Json(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn run(cli: Cli) -> Result<Outcome, Failure> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Sample => commands::sample(&cfg),
        Command::Curve => commands::curve(&cfg),
        Command::Favard => commands::favard(&cfg),
        Command::Verify { which } => commands::verify(&cfg, which),
        Command::Fit => commands::fit(&cfg),
        Command::Plot => commands::plot(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(4),
            };
        }
    };
    match run(cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(2),
        Err(f) => {
            eprintln!("favardlab: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
