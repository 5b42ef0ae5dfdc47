use thiserror::Error;

/// Errors raised anywhere in the core library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown atom `{0}`")]
    UnknownAtom(String),

    #[error("invalid name `{name}`: {reason}")]
    InvalidName { name: String, reason: &'static str },

    #[error("space has {0} worlds; at most {1} are supported")]
    TooManyWorlds(usize, usize),

    #[error("space must have at least one world")]
    EmptySpace,

    #[error("events belong to different spaces")]
    SpaceMismatch,

    #[error("world index {0} out of range")]
    WorldOutOfRange(usize),

    #[error("conditioning event is ranked with F")]
    InvalidConditioner,

    #[error("rank table: {0}")]
    InvalidRanks(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("duplicate judgment id `{0}`")]
    DuplicateJudgment(String),

    #[error("{what}: {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("conditional structure has no valid conditioners")]
    EmptyDomain,

    #[error("dimension mismatch: expected {expected} coefficients, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("credal set is empty")]
    EmptyCredalSet,

    #[error("conditioning event has zero probability throughout the credal set")]
    ZeroProbabilityConditioner,

    #[error("solver returned an unexpected outcome: {0}")]
    Solver(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
