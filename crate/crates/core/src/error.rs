use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Every variant is a precondition or data-validation failure; numerical
/// outcomes such as "not surjective" are reported through return values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix data is invalid: {0}")]
    InvalidMatrix(String),

    #[error("tolerance out of range [0, 1e-2]: {0}")]
    InvalidTolerance(String),

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("not a system of matrix units: {0}")]
    NotMatrixUnits(String),

    #[error("rank of e11 is {found}, expected {expected}")]
    RankMismatch { expected: usize, found: usize },

    #[error("diagonal units of the two families differ (residual {residual:.3e})")]
    DiagonalMismatch { residual: f64 },

    #[error("word is not freely reduced at position {0}")]
    NotReduced(usize),

    #[error("unsupported parameter: {0}")]
    Unsupported(String),

    #[error("no admissible corner rank r with r/d < eps (d = {d}, eps = {eps})")]
    NoAdmissibleRank { d: usize, eps: f64 },

    #[error("no admissible pair of unimodular points avoids the spectra")]
    LambdaSearch,

    #[error("algebra closure did not stabilize within {0} passes")]
    ClosureCap(usize),

    #[error("ambient dimension {dim} exceeds the configured budget {budget}")]
    DimensionBudget { dim: usize, budget: usize },

    #[error("character table is invalid: {0}")]
    InvalidTable(String),

    #[error("class function is not normalized: phi(e) = {0}")]
    NotNormalized(String),

    #[error("eigenvalue iteration did not converge")]
    NoConvergence,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
