use faer::c64;

/// Errors raised by the numerical core.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix must be square and non-empty, got {rows}x{cols}")]
    Shape { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian: max |A - A†| = {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |U†U - 1| = {defect:e} exceeds {tolerance:e}")]
    NotUnitary { defect: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hermitian eigensolver failed to converge")]
    EigenSolver,

    #[error("numerical failure in {0}")]
    Numerical(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("self-consistency solver failed at lambda = {lambda}: {detail}")]
    NoConvergence { lambda: c64, detail: String },

    #[error("negative density {value:e} at lambda = {lambda} (branch error)")]
    NegativeDensity { lambda: f64, value: f64 },

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("incompatible histograms: {0}")]
    Incompatible(String),

    #[error("initial density matrix has trace {trace}, expected 1")]
    NotNormalized { trace: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
