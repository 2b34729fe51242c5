use thiserror::Error;

/// Errors across the tomography pipeline.
#[derive(Debug, Error)]
pub enum TomoError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian within tolerance (max deviation {deviation:.3e})")]
    NonHermitian { deviation: f64 },

    #[error("matrix is not a physical state: {reason}")]
    NotPhysical { reason: String },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid Stokes tensor: {0}")]
    InvalidStokes(String),

    #[error("invalid qubit subset: {0}")]
    InvalidSubset(String),

    #[error("outcome index {outcome} out of range for {n_qubits} qubits")]
    OutcomeOutOfRange { outcome: usize, n_qubits: usize },

    #[error("invalid detector combination: {0}")]
    InvalidDetectorPattern(String),

    #[error("count record is empty (all counts zero)")]
    EmptyRecord,

    #[error("dataset is missing {count} required setting(s): {listed}")]
    MissingSettings { count: usize, listed: String },

    #[error("invalid source parameters: {0}")]
    InvalidSource(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("starting point is not a physical state (min eigenvalue {min_eig:.3e})")]
    NonPhysicalStart { min_eig: f64 },

    #[error("too few samples: {got} (need at least {need})")]
    TooFewSamples { got: usize, need: usize },

    #[error("count file format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl TomoError {
    /// Short machine-parsable category slug, used by the CLI for one-line
    /// error reporting.
    pub fn category(&self) -> &'static str {
        use TomoError::*;
        match self {
            DimensionMismatch { .. } | NotSquare { .. } | InvalidSubset(_)
            | OutcomeOutOfRange { .. } => "dimension",
            NonFinite | NonHermitian { .. } | NotPhysical { .. } | NotNormalized { .. }
            | InvalidStokes(_) | NonPhysicalStart { .. } => "state",
            InvalidDetectorPattern(_) => "detector",
            EmptyRecord => "empty-record",
            MissingSettings { .. } => "schedule-incomplete",
            InvalidSource(_) | InvalidConfig(_) => "config",
            TooFewSamples { .. } => "samples",
            Format(_) => "format",
            Io(_) => "io",
            Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, TomoError>;
