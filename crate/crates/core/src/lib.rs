//! Structure learning for sparse binary pairwise Markov networks.
//!
//! The L1-penalized pseudo-likelihood of a binary pairwise Markov network is
//! exactly the loss of one L1-penalized logistic regression over a stacked,
//! structured design matrix. This crate builds that design implicitly
//! ([`transform`]), solves the penalized regression path with IRLS and
//! cyclic coordinate descent under strong-rule screening ([`solver`]), and
//! wraps it as the PLG estimator next to two baselines: node-wise logistic
//! regression and a direct proximal-gradient optimizer of the
//! pseudo-likelihood ([`estimators`]).
//!
//! Supporting modules cover exact objective evaluation ([`model`]), Gibbs
//! simulation of ground-truth networks ([`sampling`]), StARS selection of the
//! penalty level ([`selection`]), and structure-recovery and timing
//! evaluation ([`eval`]).
//!
//! Vertex and coefficient indices are 0-based throughout the API. The file
//! formats in [`io`] use 1-based indices.

pub mod error;
pub mod estimators;
pub mod eval;
pub mod io;
pub mod model;
pub mod numeric;
pub mod sampling;
pub mod selection;
pub mod solver;
pub mod transform;

pub use error::{Error, Result};
pub use estimators::{
    fit_direct_pl, fit_nlr, fit_plg, relative_difference, DirectConfig, FitReport, Method, Symmetrize,
};
pub use model::{ObjectiveValue, SampleMatrix, ThetaMatrix};
pub use solver::{PathSolution, Screening, SolverConfig};
pub use transform::{build_stacked, StackedProblem, StructuredDesign, ThetaVector};
