use thiserror::Error;

pub type Result<T> = std::result::Result<T, QcsError>;

#[derive(Debug, Error)]
pub enum QcsError {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NonUnitary { deviation: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCount { n: usize, min: usize, max: usize },

    #[error("expected an even number of qubits, got {n}")]
    OddQubits { n: usize },

    #[error("zero-probability projection; cannot renormalize")]
    ZeroProbability,

    #[error("state is not a singlet (residual {residual:.3e})")]
    NotSinglet { residual: f64 },

    #[error("numerical rank ambiguity: singular value {value:.3e} within {margin:.3e} of cutoff {cutoff:.3e}")]
    RankAmbiguity { value: f64, cutoff: f64, margin: f64 },

    #[error("solver did not converge after {restarts} restarts (best residual {residual:.3e})")]
    SolverFailure { restarts: usize, residual: f64 },

    #[error("sector check indeterminate: standard error {std_err:.3e} too large, request more samples")]
    Indeterminate { std_err: f64 },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

impl QcsError {
    /// Process exit code for the CLI: 1 invariant violation, 2 bad
    /// arguments, 3 solver/optimizer failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            QcsError::IndexOutOfRange { .. }
            | QcsError::QubitCount { .. }
            | QcsError::OddQubits { .. }
            | QcsError::InvalidArgument(_) => 2,
            QcsError::SolverFailure { .. } | QcsError::Indeterminate { .. } => 3,
            _ => 1,
        }
    }
}
