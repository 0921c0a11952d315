use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("interior point count must be odd, got {0}")]
    EvenCount(usize),

    #[error("interior point count must be at least 1")]
    EmptyGrid,

    #[error("degenerate interval [{lo}, {hi}]")]
    DegenerateInterval { lo: f64, hi: f64 },

    #[error("mesh widths disagree: h_x = {hx}, h_y = {hy}")]
    MeshWidthMismatch { hx: f64, hy: f64 },

    #[error("index ({i}, {j}) outside grid of size {nx} x {ny}")]
    IndexOutOfRange { i: usize, j: usize, nx: usize, ny: usize },

    #[error("coefficient sample a = {value} at grid index {index} is not positive")]
    NonPositiveDiffusion { index: usize, value: f64 },

    #[error("coefficient sample c = {value} at grid index {index} is negative")]
    NegativeReaction { index: usize, value: f64 },

    #[error("coefficient field has {got} samples, grid has {expected} points")]
    SampleCount { expected: usize, got: usize },

    #[error("epsilon must lie in (0, 1), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("boundary rows are already scaled")]
    AlreadyScaled,

    #[error("operator carries no stencil layout (was it read from a file?)")]
    MissingLayout,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular (zero pivot in column {column})")]
    Singular { column: usize },

    #[error("dimension {dim} exceeds the inverse cap of {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("missing coefficient bounds: {0}")]
    MissingBounds(&'static str),

    #[error("constraint variant not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
