//! Library side of the `cergm` binary: configuration, command dispatch and
//! output writing.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod output;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] cergm::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for an empty constraint window, 4 for numerical
    /// failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(cergm::Error::Infeasible { .. }) => 3,
            CliError::Model(cergm::Error::Numerical(_)) => 4,
            CliError::Model(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}
