use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate segment between hits {from} and {to}")]
    DegenerateSegment { from: usize, to: usize },

    #[error("no ground truth")]
    NoGroundTruth,

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("structurally infeasible instance: {0}")]
    StructurallyInfeasible(String),

    #[error("dimension error: expected {expected} variables, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("variables {0} and {1} are paired by more than one triplet")]
    DuplicatePair(usize, usize),

    #[error("instance too large for exact search: {hits} hits on one layer of a component (cap {cap})")]
    TooLarge { hits: usize, cap: usize },

    #[error("no feasible assignment exists")]
    Infeasible,

    #[error("time limit exceeded")]
    Timeout,

    #[error("cannot decode infeasible assignment")]
    DecodeInfeasible,

    #[error("repair failed")]
    RepairFailed,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("undefined gap: reference is zero")]
    UndefinedGap,

    #[error("no methods")]
    NoMethods,

    #[error("empty csv")]
    EmptyCsv,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: unsupported format version {found}")]
    Version { path: PathBuf, found: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
