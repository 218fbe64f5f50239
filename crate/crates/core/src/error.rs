use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid timed word at positions {first}..{second}: {reason}")]
    InvalidLasso {
        first: usize,
        second: usize,
        reason: String,
    },
    #[error("periodicity not detected for {0}")]
    PeriodicityNotDetected(String),
    #[error("unresolved binding: {0}")]
    UnresolvedBinding(String),
    #[error("dnf clause cap of {0} exceeded")]
    DnfCapExceeded(usize),
    #[error("state cap of {0} exceeded")]
    StateCapExceeded(usize),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("no proper letter matches action `{action}` at position {position}")]
    NoProperLetter { action: String, position: usize },
    #[error("cyclic reference through `{0}`")]
    CyclicReference(String),
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),
    #[error("free variables not covered: {0}")]
    FreeVariable(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Short machine-readable category, used as the prefix of CLI error lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidInterval(_) => "invalid-interval",
            Error::InvalidLasso { .. } => "invalid-word",
            Error::PeriodicityNotDetected(_) => "periodicity-not-detected",
            Error::UnresolvedBinding(_) => "unresolved-binding",
            Error::DnfCapExceeded(_) => "dnf-cap",
            Error::StateCapExceeded(_) => "state-cap",
            Error::AlphabetMismatch(_) => "alphabet-mismatch",
            Error::NoProperLetter { .. } => "no-proper-letter",
            Error::CyclicReference(_) => "cyclic-reference",
            Error::VocabularyMismatch(_) => "vocabulary-mismatch",
            Error::FreeVariable(_) => "free-variable",
            Error::Parse { .. } => "parse",
            Error::Unsupported(_) => "unsupported",
        }
    }

    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
