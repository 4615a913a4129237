//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, walk evolution, and experiments.
#[derive(Debug, Error)]
pub enum Error {
    /// Glued-trees depth must be at least 1.
    #[error("glued-trees depth must be >= 1, got {0}")]
    InvalidDepth(usize),

    /// Operand dimensions do not agree.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// Coin matrix failed the unitarity check.
    #[error("coin matrix is not unitary: max |C\u{2020}C - I| = {max_deviation:.3e}")]
    NonUnitaryCoin { max_deviation: f64 },

    /// Grover coin needs a coin space of dimension at least 2.
    #[error("Grover coin requires dimension >= 2, got {0}")]
    CoinDimensionTooSmall(usize),

    /// Initial coin amplitudes must be normalized.
    #[error("initial coin state is not normalized: |norm^2 - 1| = {deviation:.3e}")]
    UnnormalizedInitialState { deviation: f64 },

    /// Dephasing strength is outside [0, 1].
    #[error("dephasing strength eta must lie in [0, 1], got {0}")]
    EtaOutOfRange(f64),

    /// The Kraus expansion diverges at eta = 0; only the closed form covers it.
    #[error("Kraus operators are undefined at eta = 0 (sqrt(-2 ln eta) diverges)")]
    KrausUndefinedAtZeroEta,

    /// The truncated Kraus sum needs at least one term.
    #[error("Kraus truncation needs at least 1 term, got {0}")]
    KrausNoTerms(usize),

    /// An operation required a density-matrix state but got a pure state.
    #[error("operation requires a density-matrix state")]
    DensityRequired,

    /// An operation required a pure state but got a density matrix.
    #[error("operation requires a pure state")]
    PureRequired,

    /// Start vertex outside the graph.
    #[error("start vertex {vertex} out of range for {num_vertices} vertices")]
    StartVertexOutOfRange { vertex: usize, num_vertices: usize },

    /// Edge-list text could not be parsed.
    #[error("edge-list parse error at line {line}: {message}")]
    EdgeListParse { line: usize, message: String },

    /// Experiment configuration violates an invariant.
    #[error("invalid experiment config: {0}")]
    InvalidConfig(String),

    /// A requested (eta, step) cell is not present in the trace.
    #[error("trace has no entry for eta = {eta}, step = {step}")]
    NotInTrace { eta: f64, step: usize },

    /// A density-matrix run would exceed the memory budget.
    #[error(
        "density matrix for {layers} layers needs {needed_bytes} bytes \
         (limit {limit_bytes}); reduce the layer count or drop eta < 1 values"
    )]
    MemoryInfeasible {
        layers: usize,
        needed_bytes: u64,
        limit_bytes: u64,
    },

    /// I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
