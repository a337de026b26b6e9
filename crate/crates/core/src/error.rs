use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a language needs between 1 and 16 atoms, got {0}")]
    AtomCount(usize),

    #[error("invalid atom name `{0}`")]
    InvalidAtomName(String),

    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),

    #[error("`{text}` is not a valuation over {atoms} atoms")]
    BadValuation { text: String, atoms: usize },

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("language mismatch: {left} atoms vs {right} atoms")]
    LanguageMismatch { left: usize, right: usize },

    #[error("revision input is inconsistent (empty model set)")]
    EmptyInput,

    #[error("input {index} of the sequence is inconsistent (empty model set)")]
    EmptyInputAt { index: usize },

    #[error("input sequence is empty")]
    EmptySequence,

    #[error("level {0} is empty")]
    EmptyLevel(usize),

    #[error("levels do not partition the valuations: {0}")]
    NotAPartition(String),

    #[error("postulate {postulate} takes {expected} inputs, got {got}")]
    Arity {
        postulate: String,
        expected: usize,
        got: usize,
    },

    #[error("unknown postulate `{0}`")]
    UnknownPostulate(String),

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
