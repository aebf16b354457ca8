use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate uses qubit {0} both as control and target")]
    OverlappingQubits(usize),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("invalid bitstring {bits:?} for {n_qubits} qubits")]
    InvalidBitstring { bits: String, n_qubits: usize },

    #[error("parameter count mismatch: expected {expected}, got {actual}")]
    ParamCountMismatch { expected: usize, actual: usize },

    #[error("shots must be at least 1")]
    ZeroShots,

    #[error("precision must lie in (0, 1), got {0}")]
    InvalidPrecision(f64),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("no decomposition for {0}")]
    UnsupportedDecomposition(String),

    #[error("empty knowledge graph")]
    EmptyGraph,

    #[error("empty dataset")]
    EmptyData,

    #[error("no negative example exists for triple ({head}, {relation}, {tail})")]
    NoNegativeAvailable {
        head: usize,
        relation: usize,
        tail: usize,
    },

    #[error("index {index} out of range for {what} (size {size})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        size: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown {kind} {name:?}")]
    UnknownName { kind: &'static str, name: String },

    #[error("unsupported checkpoint format version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from invalid user input rather than a failure
    /// while running.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
