//! Library side of the `qwire` command-line tool: the circuit file format
//! and the algorithm reports.
//!
//! Exit codes: `0` success, `2` invalid input (arguments, unreadable or
//! malformed circuit file), `3` simulation failure, `4` output could not be
//! written.

pub mod algo;
pub mod file;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Simulation(String),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Output(_) => 4,
        }
    }
}
