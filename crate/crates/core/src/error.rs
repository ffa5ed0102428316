use std::path::PathBuf;

/// Errors produced by instance construction, solvers, generators and parsers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("instance must contain at least one item")]
    EmptyInstance,

    #[error("item {index}: weight must be positive and finite, got {weight}")]
    BadWeight { index: usize, weight: f64 },

    #[error("item {index}: profit must be nonnegative and finite, got {profit}")]
    BadProfit { index: usize, profit: f64 },

    #[error("capacity must be positive and finite, got {capacity}")]
    BadCapacity { capacity: f64 },

    #[error("selection index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("selection index {index} appears more than once")]
    DuplicateIndex { index: usize },

    #[error("{solver} is limited to n <= {limit}, instance has n = {n}")]
    InstanceTooLarge {
        solver: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("backtrack corrupted: step from object {from} reached object {to} (chain must strictly decrease)")]
    BacktrackCorrupted { from: usize, to: usize },

    #[error("bin table of {bins} bins for n = {n} exceeds addressable memory")]
    TableTooLarge { n: usize, bins: usize },

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "fixed-k calibration failed after {attempts} attempts (n = {n}, target k = {target})"
    )]
    CalibrationFailed {
        n: usize,
        target: usize,
        attempts: usize,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("data integrity: {0}")]
    DataIntegrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
