use thiserror::Error;

use crate::solver::{LassoFit, PathSolution};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {p} exceeds the enumeration limit of {max}")]
    DimensionTooLarge { p: usize, max: usize },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid index: {0}")]
    InvalidIndex(String),

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("non-finite value at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    /// Coordinates are 1-based, as they appear in the input file.
    #[error("entry at row {row}, column {col} is {value:?}, expected 0 or 1")]
    NotBinary {
        row: usize,
        col: usize,
        value: String,
    },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("response is constant; the penalized path is degenerate")]
    DegenerateResponse,

    #[error("solver did not converge at lambda {lambda} (max KKT violation {})", fit.kkt_max_violation)]
    NonConvergence { lambda: f64, fit: Box<LassoFit> },

    #[error("path stopped at grid index {failed_at} (lambda {lambda}): {reason}")]
    PathIncomplete {
        failed_at: usize,
        lambda: f64,
        reason: String,
        partial: Box<PathSolution>,
    },

    #[error("reference matrix has zero norm")]
    ZeroNorm,

    #[error("ground truth has {edges} of {pairs} possible edges; ROC is undefined")]
    DegenerateTruth { edges: usize, pairs: usize },

    #[error("no lambda on the grid reaches instability <= {beta} (smallest monotone instability {best})")]
    NoFeasibleLambda { beta: f64, best: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
