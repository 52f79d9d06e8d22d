// SPDX-License-Identifier: Apache-2.0

//! Library behind the `qeff` binary: reports, sweeps, maximization and
//! oracle verification suites for QND detector efficiencies.

// `!(x > 0.0)` is how NaN gets rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eval;
pub mod format;
pub mod manifest;
pub mod maximize;
pub mod sweep;
pub mod verify;

pub use cli::run;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] qnd_efficiency::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for usage and config problems, which is every error this type carries.
    pub fn exit_code(&self) -> i32 {
        2
    }
}
