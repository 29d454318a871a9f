//! Command-line front end for the simplex mirror-descent library: config
//! parsing, single runs, grid sweeps, and machine-readable artifacts.

pub mod config;
pub mod runner;

use thiserror::Error;

/// CLI failures, split by exit code: configuration problems exit with 2,
/// runtime failures (after flushing partial artifacts) with 3.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("runtime error: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }
}

/// Environment variable that overrides the output directory (lower
/// precedence than `--out`, higher than the config file).
pub const OUT_DIR_ENV: &str = "SIMPLEX_MD_OUT";
