use crate::ansatz::ParamIndex;
use crate::qsim::MAX_QUBITS;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("register of {0} qubits is outside the supported range 1..={MAX_QUBITS}")]
    QubitCount(usize),

    #[error("qubit {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("controlled gate needs two distinct qubits, got {0} twice")]
    SameQubit(usize),

    #[error("expected a bitstring of length {expected}, got {actual}")]
    BitLength { expected: usize, actual: usize },

    #[error("invalid bit character {0:?}, expected '0' or '1'")]
    BitChar(char),

    #[error("parameter index {0:?} out of range")]
    ParamIndex(ParamIndex),

    #[error("dataset is empty")]
    EmptyData,

    #[error("unbiased MMD needs at least 2 samples on each side, got {0} and {1}")]
    TooFewSamples(usize, usize),

    #[error("{0} needs full access to the circuit's probability vector")]
    NeedsFullAccess(&'static str),

    #[error("unknown dataset {0:?} (expected gaussian, moon or rings)")]
    UnknownDataset(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("line {line}: {message}")]
    Validation { line: u64, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
