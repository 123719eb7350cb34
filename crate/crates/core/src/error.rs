use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {requested} exceeds the configured maximum of {limit} entries")]
    DimensionOverflow { requested: u128, limit: usize },

    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },

    #[error("vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("subnormalization {alpha} is smaller than the spectral norm {norm}")]
    SubnormalizationTooSmall { alpha: f64, norm: f64 },

    #[error("zero matrix needs an explicit subnormalization")]
    ZeroOperator,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("encodings are not uniform: {0}")]
    NonUniform(String),

    #[error("term {term}: {reason}")]
    InvalidTerm { term: usize, reason: String },

    #[error("{width} qubits exceeds the limit of {limit} for {what}")]
    TooManyQubits {
        width: usize,
        limit: usize,
        what: &'static str,
    },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
