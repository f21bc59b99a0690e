use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("quadrature order {requested} is below the required {required} (2 x n_hermite)")]
    QuadratureOrder { requested: usize, required: usize },

    #[error("node index {index} out of range for a grid with {count} nodes")]
    NodeOutOfRange { index: usize, count: usize },

    #[error("second moment needs Hermite rows 0..=2, field has {rows} rows")]
    HermiteTooShort { rows: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("source violates the zero-mean compatibility condition at node {node} (theta-mean {mean:e})")]
    Compatibility { node: usize, mean: f64 },

    #[error("time step {dt:e} exceeds the stability bound {limit:e}")]
    Cfl { dt: f64, limit: f64 },

    #[error("non-finite coefficient encountered at t = {time}")]
    NonFinite { time: f64 },

    #[error("mass mismatch: {0}")]
    MassMismatch(String),

    #[error(
        "operation is defined for identical oscillators only (single-node grid), got {0} nodes"
    )]
    MultiNodeGrid(usize),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown initial law `{0}`")]
    UnknownLaw(String),

    #[error("cannot fit: {0}")]
    Fit(String),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
