use thiserror::Error;

use crate::parser::{ParseError, ProblemError};
use crate::pipeline::CheckReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("the quotient algebra is not finite-dimensional (variety is not finite)")]
    NotZeroDimensional,
    #[error("no separating linear form found after {attempts} attempts")]
    SeparationFailed { attempts: usize },
    #[error("point {point} is not on the variety")]
    PointNotOnVariety { point: String },
    #[error("element is not idempotent")]
    NotIdempotent,
    #[error("the tensor coefficient matrix is singular; hypotheses of the construction are violated")]
    SingularTensor,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("hypothesis checks failed: {}", .0.failure_summary())]
    ChecksFailed(Box<CheckReport>),
    #[error("regularization failed after {attempts} attempts (seed {seed})")]
    RegularizationFailed { attempts: usize, seed: u64 },
    #[error("the bilinear form is degenerate: inertia ({pos}, {neg}, {null})")]
    DegenerateForm { pos: usize, neg: usize, null: usize },
    #[error("the system is not radical (some solution is multiple)")]
    NotRadical,
    #[error("perturbed samples disagree on the local degree: {degrees:?}")]
    InconsistentSamples { degrees: Vec<i64> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
