use thiserror::Error;

/// Errors raised by geometry, optimization and data-loading routines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("non-finite entries in {0}")]
    NonFinite(&'static str),

    #[error("tangent vector is anchored at a different point")]
    BaseMismatch,

    #[error("points on different manifolds: {0} vs {1}")]
    ManifoldMismatch(String, String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("target outside the injectivity region of the inverse retraction (minimal eigenvalue pair sum {pair_sum:.3e})")]
    OutOfInjectivity { pair_sum: f64 },

    #[error("empty point list")]
    EmptyPointList,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver did not converge after {iters} iterations (residual {residual:.3e})")]
    NonConvergence { iters: usize, residual: f64 },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{row}:{col}: {message}")]
    Parse {
        path: String,
        row: usize,
        col: usize,
        message: String,
    },

    #[error("bad file format in {path}: {message}")]
    Format { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
