use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. The CLI maps these onto stable exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Odd dimension or a matrix that is not skew-symmetric where one is required.
    #[error("form error: {0}")]
    Form(String),

    #[error("inconsistent linear system: right-hand side is outside the column space")]
    Inconsistent,

    #[error("singular basis: {0}")]
    SingularBasis(String),

    #[error("not a chain complex: boundary composition is nonzero at degree {degree}")]
    NotAComplex { degree: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("sequence is not short exact: {0}")]
    Exactness(String),

    #[error("bases are not compatible: {0}")]
    Compatibility(String),

    #[error("degenerate pairing: {0}")]
    Degenerate(String),

    #[error("field error: {0}")]
    Field(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a group element: {0}")]
    GroupMembership(String),

    #[error("relator is not satisfied (defect {defect:e})")]
    InvalidRepresentation { defect: f64 },

    #[error("representation is reducible: {0}")]
    Reducible(String),

    #[error("cochain and cycle bases do not pair nondegenerately: {0}")]
    BasisMismatch(String),

    #[error("cocycle violates a switch condition: {0}")]
    Admissibility(String),

    #[error("unknown symplectic form label {0:?}")]
    UnknownForm(String),

    #[error("root-finder did not converge: {0}")]
    NoConvergence(String),

    #[error("parse error: {0}")]
    Parse(String),
}
