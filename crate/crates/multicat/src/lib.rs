//! Standard-library side of `multicat`: file formats, rayon-parallel solver
//! drivers, distance matrices, property suites and the command line.

use std::io::Read;
use std::path::Path;

pub mod checks;
pub mod cli;
pub mod formats;
pub mod matrix;
pub mod parallel;

pub use cli::run;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {error}")]
    Io { path: String, error: std::io::Error },
    #[error(transparent)]
    Format(#[from] formats::FormatError),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 2 for usage and IO problems, 1 for invalid mathematical input.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Format(_) | CliError::Domain(_) => 1,
        }
    }
}

/// Reads a file, or stdin for `-`.
pub fn read_input(path: &Path) -> Result<String, CliError> {
    let io = |error| CliError::Io { path: path.display().to_string(), error };
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(io)
    }
}
