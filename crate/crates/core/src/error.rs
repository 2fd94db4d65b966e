// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid split plan: {0}")]
    InvalidPlan(String),

    #[error("infeasible split: {0}")]
    InfeasibleSplit(String),

    #[error("insufficient columns: group {group} has {found}, need at least {needed}")]
    InsufficientColumns {
        group: usize,
        found: usize,
        needed: usize,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("empty index set")]
    EmptyIndex,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
