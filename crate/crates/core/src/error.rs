use thiserror::Error;

/// Errors shared by all modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("linear system has no solution")]
    NoSolution,

    #[error("rank-deficient input: {0}")]
    RankDeficient(String),

    #[error("sublattice is not primitive")]
    NotPrimitive,

    #[error("sublattice is not isotropic")]
    NotIsotropic,

    #[error("pairing is not unimodular")]
    NotUnimodular,

    #[error("element does not stabilize the isotropic subspace")]
    NotInParabolic,

    #[error("map is not integral: {0}")]
    NotIntegral(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal invariant failure: {0}")]
    Internal(String),

    #[error("bad input: {0}")]
    BadInput(String),
}

impl Error {
    /// Exit code used by the CLI: 1 for malformed input, 2 for violated
    /// preconditions, 3 for internal invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BadInput(_) => 1,
            Error::Internal(_) => 3,
            _ => 2,
        }
    }
}
