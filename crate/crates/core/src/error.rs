use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid Pauli label character {found:?} at position {position}")]
    InvalidLabel { position: usize, found: char },

    #[error("empty Pauli label")]
    EmptyLabel,

    #[error("invalid bit string character {found:?} at position {position}")]
    InvalidBits { position: usize, found: char },

    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n} qubits")]
    QubitOutOfRange { index: usize, n: usize },

    #[error("gate {gate} applied to repeated qubit {index}")]
    RepeatedQubit { gate: &'static str, index: usize },

    #[error("gate {gate} expects {expected} qubit indices, got {found}")]
    GateArity { gate: &'static str, expected: usize, found: usize },

    #[error("observable {0} is not Hermitian")]
    InvalidObservable(String),

    #[error("invalid stabilizer generators: {0}")]
    InvalidGenerators(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("observable support is not covered by the measured region: {0}")]
    UnsupportedObservable(String),

    #[error("{what} too large: {value} > {max}")]
    TooLarge { what: &'static str, value: usize, max: usize },

    #[error("operator is not proportional to a Pauli string")]
    NotPauli,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
