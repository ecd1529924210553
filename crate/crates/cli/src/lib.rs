//! Front end of `gdl`: argument parsing, configuration merging, the
//! commands and their CSV/JSON writers.

pub mod args;
pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;

use clap::Parser;
use gdl_core::GdlError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] GdlError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Json(_) => 2,
            CliError::Core(e) if is_usage(e) => 2,
            _ => 3,
        }
    }
}

/// Core errors that stem from bad input rather than a failed computation.
fn is_usage(e: &GdlError) -> bool {
    matches!(
        e,
        GdlError::InvalidSpec(_)
            | GdlError::UnsupportedVariant(_)
            | GdlError::UnsupportedRegime(_)
            | GdlError::Phase { .. }
            | GdlError::Domain { .. }
            | GdlError::Collapse { .. }
    )
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit status of a finished command.
pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("gdl: {e}");
            e.exit_code()
        }
    }
}
