//! Command-line front end: design, analyze, trace, price and verify a trammel.
//!
//! Exit codes: 0 success, 1 validation or verification failure, 2 I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub mod commands;
pub mod config;

pub use config::{Format, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Verification(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ellipsograph",
    version,
    about = "Trammel of Archimedes: kinematics, clearance, drawings and parts"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    /// Pen beyond the x-channel pivot.
    Outside,
    /// Pen between the two pivots.
    Between,
}

/// Config file and per-field overrides shared by the analysis commands.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// Sectioned key=value config file.
    #[arg(long, short = 'c')]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "pivot_separation_studs")]
    pub pivot_separation_mm: Option<f64>,
    #[arg(long)]
    pub pivot_separation_studs: Option<f64>,
    #[arg(long, conflicts_with = "pen_offset_studs")]
    pub pen_offset_mm: Option<f64>,
    #[arg(long)]
    pub pen_offset_studs: Option<f64>,
    #[arg(long)]
    pub shuttle_length_mm: Option<f64>,
    #[arg(long)]
    pub shuttle_width_mm: Option<f64>,
    #[arg(long)]
    pub channel_half_length_mm: Option<f64>,
    #[arg(long)]
    pub page_width_mm: Option<f64>,
    #[arg(long)]
    pub page_height_mm: Option<f64>,
    #[arg(long)]
    pub margin_mm: Option<f64>,
    #[arg(long)]
    pub max_chord_mm: Option<f64>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pivot separation and pen offset for a target ellipse.
    Design {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, value_enum, default_value = "outside")]
        variant: VariantArg,
        #[arg(long, default_value_t = 32.0)]
        shuttle_length_mm: f64,
        #[arg(long, default_value_t = 8.0)]
        shuttle_width_mm: f64,
    },
    /// Forbidden rod angles and drawable fraction.
    Analyze {
        #[command(flatten)]
        config: ConfigArgs,
        /// Emit the report as JSON.
        #[arg(long)]
        json: bool,
        /// Boundary refinement tolerance in radians.
        #[arg(long, default_value_t = 1e-6)]
        angle_tol: f64,
    },
    /// Sample the drawable arcs and write them as SVG or CSV.
    Trace {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Shorthand for `trace --format svg`.
    Svg {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Shorthand for `trace --format csv`.
    Csv {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, short = 'o')]
        output: Option<PathBuf>,
    },
    /// Parts list with totals.
    Bom {
        /// CSV catalog (`part_id,name,unit_price_cents,quantity`); built-in list when absent.
        #[arg(long)]
        catalog: Option<PathBuf>,
    },
    /// Check the traced curve against the ellipse identities and the numeric solver.
    Verify {
        #[command(flatten)]
        config: ConfigArgs,
        /// Override every verification tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match commands::dispatch(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
