use alloc::string::String;

/// Errors raised by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid tensor: {0}")]
    InvalidTensor(String),

    #[error("mode {mode} out of range for a tensor with {order} modes")]
    ModeOutOfRange { mode: usize, order: usize },

    #[error("rank {rank} exceeds dimension {dim} of mode {mode}")]
    RankExceedsDim { mode: usize, rank: usize, dim: usize },

    #[error("rank must be positive (mode {mode})")]
    ZeroRank { mode: usize },

    #[error("mode {mode} ({label}) is degenerate: its unfolding is entirely zero")]
    DegenerateMode { mode: usize, label: String },

    #[error("eigensolver did not converge after {iterations} sweeps (relative residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("length mismatch: expected {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("zero vector cannot be oriented")]
    ZeroVector,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid neighbor matrix: {0}")]
    InvalidNeighbors(String),

    #[error("infinite rate: {count} cases observed against a zero baseline")]
    InfiniteRate { count: f64 },

    #[error("degenerate cylinder: baseline {baseline} is not below the total {total}")]
    DegenerateCylinder { baseline: f64, total: f64 },

    #[error("invalid scan input: {0}")]
    InvalidScan(String),

    #[error("invalid synthetic configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NonConvergence { .. } | Error::DegenerateMode { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
