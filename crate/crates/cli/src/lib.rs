//! Library behind the `thermogeom` binary: argument parsing, flat-file
//! configuration, deterministic CSV emission and the verification runner.

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod args;
pub mod config;
pub mod gas_cmd;
pub mod reaction_cmd;
pub mod solution_cmd;
pub mod table;
pub mod verify;

use std::io::Write;

pub use args::{Cli, Command};
pub use config::Settings;
pub use table::Table;

/// Failure of a CLI invocation, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] thermogeom::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{failed} of {total} checks failed")]
    VerifyFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for failed verification, 2 for configuration problems, 3 for states
    /// outside a model's domain.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed { .. } => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Model(e) => match e {
                thermogeom::Error::InvalidParameter(_)
                | thermogeom::Error::DimensionMismatch { .. } => 2,
                _ => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// What a command produced: CSV rows plus human-readable summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub table: Table,
    pub summary: Vec<String>,
}

pub fn run(cli: &Cli) -> CliResult<()> {
    let settings = Settings::resolve(cli)?;
    let output = match &cli.command {
        Command::Gas(a) => gas_cmd::run(a.action, &settings)?,
        Command::Reaction(a) => reaction_cmd::run(a.action, &settings)?,
        Command::Solution(a) => solution_cmd::run(a.action, &settings)?,
        Command::Verify(_) => return verify::run_cli(&settings),
    };
    emit(&output, &settings)
}

/// Writes the table to `out` when set (stdout otherwise) and the summary to stderr.
pub fn emit(output: &Output, settings: &Settings) -> CliResult<()> {
    let csv = output.table.to_csv();
    match settings.get_str("out") {
        Some(path) => std::fs::write(path, csv).map_err(|source| CliError::Io {
            path: path.to_string(),
            source,
        })?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?;
        }
    }
    for line in &output.summary {
        eprintln!("{line}");
    }
    Ok(())
}
