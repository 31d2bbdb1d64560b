use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("qubit index {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    #[error("invalid observable {0}: measured observables must be Hermitian")]
    InvalidObservable(String),

    #[error("invalid stabilizer generators: {0}")]
    InvalidGenerators(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("unknown protocol `{0}`")]
    Catalog(String),

    #[error("cannot build stabilizer check: {0}")]
    Construction(String),

    #[error(
        "branch outcome depends on measurement randomness ({0}); \
         first-order expansion refuses to average over it"
    )]
    Ambiguity(String),

    #[error("value out of domain: {0}")]
    Domain(String),

    #[error("circuit failed validation:\n{0}")]
    Validation(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub(crate) fn check_dimension(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::Dimension { expected, found })
    }
}
