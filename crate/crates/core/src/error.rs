use thiserror::Error;

/// Errors raised by the numerical kernel, state containers and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} > tolerance {tol:e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("expected a {expected} matrix, got {rows}x{cols}")]
    WrongShape {
        expected: &'static str,
        rows: usize,
        cols: usize,
    },

    #[error("matrix entries must be finite")]
    NonFinite,

    #[error("entry count {len} does not match {rows}x{cols}")]
    EntryCount { len: usize, rows: usize, cols: usize },

    #[error("invalid subsystem dimensions {0:?}")]
    BadDims(Vec<usize>),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },

    #[error("invalid bipartition cut {0:?}")]
    BadCut(Vec<usize>),

    #[error("state must be bipartite, got dims {0:?}")]
    NotBipartite(Vec<usize>),

    #[error("expected dims {expected}, got {got:?}")]
    WrongDims { expected: &'static str, got: Vec<usize> },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("density matrix trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("rank {rank} is outside 1..={max}")]
    BadRank { rank: usize, max: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("rotation columns are not orthonormal (deviation {0:e})")]
    NotLeftOrthonormal(f64),

    #[error("state rank {rank} exceeds ensemble size {ensemble_size}")]
    RankExceedsEnsembleSize { rank: usize, ensemble_size: usize },

    #[error("invalid equal-marginal spec: {0}")]
    InvalidSpec(String),

    #[error("state does not match the supplied expansion (deviation {0:e})")]
    ExpansionMismatch(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("failed to parse {field}: {message}")]
    Parse { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
