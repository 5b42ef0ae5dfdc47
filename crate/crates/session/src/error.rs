use qualprob::Error as CoreError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown session `{0}`")]
    UnknownSession(String),

    #[error("unknown or retracted judgment `{0}`")]
    UnknownJudgment(String),

    #[error("invalid space declaration: {0}")]
    InvalidSpace(String),

    #[error("{field}: {source}")]
    Parse {
        field: &'static str,
        #[source]
        source: CoreError,
    },

    #[error("relation must be one of >, >=, =, <=, <; got `{0}`")]
    InvalidRelation(String),

    #[error("the session's judgments are inconsistent; retract a conflicting judgment first")]
    InconsistentSession,

    #[error("{0}")]
    Query(CoreError),

    #[error("{what}: {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("query exceeded the time budget of {0} ms")]
    Timeout(u64),

    #[error("journal line {line}: {message}")]
    Journal { line: usize, message: String },

    #[error("journal i/o: {0}")]
    Io(String),

    #[error("bad request: {0}")]
    BadRequest(String),
}

impl SessionError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::UnknownJudgment(_) => "unknown_judgment",
            SessionError::InvalidSpace(_) => "invalid_space",
            SessionError::Parse { .. } => "parse_error",
            SessionError::InvalidRelation(_) => "invalid_relation",
            SessionError::InconsistentSession => "inconsistent_session",
            SessionError::Query(CoreError::ZeroProbabilityConditioner) => {
                "zero_probability_conditioner"
            }
            SessionError::Query(_) => "query_failed",
            SessionError::CapExceeded { .. } => "cap_exceeded",
            SessionError::Timeout(_) => "timeout",
            SessionError::Journal { .. } => "corrupt_journal",
            SessionError::Io(_) => "io_error",
            SessionError::BadRequest(_) => "bad_request",
        }
    }

    /// HTTP status for the error payload.
    pub fn status(&self) -> u16 {
        match self {
            SessionError::UnknownSession(_) | SessionError::UnknownJudgment(_) => 404,
            SessionError::InvalidSpace(_)
            | SessionError::Parse { .. }
            | SessionError::InvalidRelation(_)
            | SessionError::BadRequest(_) => 400,
            SessionError::InconsistentSession => 409,
            SessionError::Query(CoreError::ZeroProbabilityConditioner) => 422,
            SessionError::CapExceeded { .. } => 413,
            SessionError::Timeout(_) => 503,
            SessionError::Query(_) | SessionError::Journal { .. } | SessionError::Io(_) => 500,
        }
    }

    /// Byte offset within the offending sentence, for syntax errors.
    pub fn offset(&self) -> Option<usize> {
        match self {
            SessionError::Parse {
                source: CoreError::Syntax { offset, .. },
                ..
            } => Some(*offset),
            _ => None,
        }
    }

    pub fn field(&self) -> Option<&'static str> {
        match self {
            SessionError::Parse { field, .. } => Some(field),
            _ => None,
        }
    }
}

impl From<std::io::Error> for SessionError {
    fn from(e: std::io::Error) -> Self {
        SessionError::Io(e.to_string())
    }
}
