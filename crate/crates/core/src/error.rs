use thiserror::Error;

/// Errors raised by the tree-boundary operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid presentation (s={s}, t={t}): s + 2t must be at least 3")]
    InvalidPresentation { s: u32, t: u32 },

    #[error("generator {0} is not part of the presentation")]
    InvalidGenerator(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("word {0:?} is not reduced")]
    NotReduced(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("depth {depth} is too small; need more than {required}")]
    DepthTooSmall { depth: usize, required: usize },

    #[error("words {x:?} and {y:?} have different lengths")]
    LengthMismatch { x: String, y: String },

    #[error("the identity element has no boundary fixed points to compute")]
    IdentityElement,

    #[error("step count must be at least 1")]
    ZeroSteps,

    #[error("set has measure zero")]
    NullSet,

    #[error("{0} is not an integer power of the branching number other than 1")]
    InvalidLambda(String),
}

impl Error {
    pub(crate) fn parse(input: &str, reason: impl Into<String>) -> Self {
        Error::Parse {
            input: input.to_string(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by exceeding a configured resource bound.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::ResourceLimit(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
