use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty Pauli string")]
    EmptyString,
    #[error("invalid Pauli character {character:?} at position {position}")]
    InvalidCharacter { position: usize, character: char },
    #[error("dimension mismatch: expected {expected} qubits, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid segment size k={k} for {n} qubits")]
    InvalidK { k: usize, n: usize },
    #[error("line {line}: {message}")]
    SyntaxError { line: usize, message: String },
    #[error("line {line}: Pauli string has {found} qubits, header declares {expected}")]
    InconsistentWidth { line: usize, expected: usize, found: usize },
    #[error("Hamiltonian has no terms above the drop tolerance")]
    EmptyHamiltonian,
    #[error("model needs at least 2 qubits, got {0}")]
    InvalidSize(usize),
    #[error("all-identity string has no support")]
    IdentityString,
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("CNOT control and target are both {0}")]
    SameControlTarget(usize),
    #[error("{n} qubits exceeds the dense limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("group members do not pairwise {k}-commute (terms {a} and {b})")]
    NotCommutingGroup { k: usize, a: usize, b: usize },
    #[error("term index {index} out of range for {len} terms")]
    TermOutOfRange { index: usize, len: usize },
    #[error("diagonalization failed for segment starting at qubit {segment_start}")]
    SynthesisFailure { segment_start: usize },
    #[error("empty coefficient group")]
    EmptyGroup,
    #[error("precision must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("shot budget {total} is smaller than the {groups} measurement circuits")]
    BudgetTooSmall { total: u64, groups: usize },
    #[error("weights sum to zero")]
    DegenerateWeights,
    #[error("bin fraction must lie in (0, 1], got {0}")]
    InvalidFraction(f64),
    #[error("Trotter step count must be at least 1")]
    InvalidSteps,
    #[error("term order is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("shot count must be at least 1")]
    InvalidShots,
    #[error("rotation angle must be finite")]
    InvalidAngle,
    #[error("at least {min} repetitions required, got {found}")]
    TooFewRepetitions { min: usize, found: usize },
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user-supplied configuration or input
    /// rather than a failure while running.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. }
                | Error::EmptyString
                | Error::InvalidCharacter { .. }
                | Error::SyntaxError { .. }
                | Error::InconsistentWidth { .. }
                | Error::EmptyHamiltonian
                | Error::InvalidSize(_)
                | Error::InvalidK { .. }
                | Error::InvalidEpsilon(_)
                | Error::InvalidFraction(_)
                | Error::InvalidSteps
                | Error::InvalidShots
                | Error::TooFewRepetitions { .. }
                | Error::BudgetTooSmall { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
