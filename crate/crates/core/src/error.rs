use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("space mismatch: {0}")]
    SpaceMismatch(String),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),

    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("axiom `{axiom}` fails; witness: {witness}")]
    Axiom { axiom: String, witness: String },

    #[error("series does not terminate within {0} terms")]
    NotNilpotent(usize),

    #[error("negative power of hbar survives: {0}")]
    NegativeHbar(String),

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("invalid rational `{0}`")]
    InvalidRational(String),
}

impl Error {
    pub fn axiom(axiom: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Axiom {
            axiom: axiom.into(),
            witness: witness.into(),
        }
    }
}
