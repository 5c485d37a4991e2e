use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("unknown subsystem label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate subsystem label `{0}`")]
    DuplicateLabel(String),

    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("columns are not orthonormal (max deviation {0:.3e})")]
    NotIsometry(f64),

    #[error("invalid Gram matrix: {0}")]
    InvalidGram(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("{count} deterministic vertices exceed the cap of {cap}")]
    VertexCap { count: u128, cap: usize },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("semidefinite solver did not converge: {0}")]
    NotConverged(String),

    #[error("input families do not span the operator space (rank {rank}, need {needed})")]
    NotSpanning { rank: usize, needed: usize },

    #[error("unsupported dimensions: {0}")]
    UnsupportedDimensions(String),
}

pub type Result<T> = std::result::Result<T, Error>;
