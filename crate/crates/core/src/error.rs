use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown candidate index {0}")]
    UnknownCandidate(usize),

    #[error("unknown candidate id `{0}`")]
    UnknownCandidateId(String),

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("rule {0} does not support selecting multiple copies of a candidate")]
    CopiesUnsupported(&'static str),

    #[error("insufficient electable candidates: filled {filled} of {k} seats")]
    InsufficientElectable { filled: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("replacement cost is not available for {rule}: {reason}")]
    ReplacementUnsupported { rule: &'static str, reason: String },

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("malformed input: {0}")]
    Parse(String),
}
