use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unknown {kind} `{name}`")]
    Lookup { kind: &'static str, name: String },

    /// An input state does not satisfy a protocol's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A measurement would not yield a deterministic answer.
    #[error("ambiguous input: {0}")]
    Ambiguous(String),

    #[error("invalid state transition: {0}")]
    State(String),

    #[error("resource exhausted: {0}")]
    Exhausted(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
