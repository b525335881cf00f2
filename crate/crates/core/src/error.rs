use thiserror::Error;

/// Errors produced by every decision procedure and compiler in the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input does not describe a valid instance. `field` names the
    /// offending part of the input.
    #[error("invalid input in `{field}`: {message}")]
    InvalidInput { field: String, message: String },

    /// A configured resource cap was exceeded.
    #[error("resource cap `{cap}` exceeded: limit {limit}, observed {observed}")]
    CapExceeded {
        cap: &'static str,
        limit: u64,
        observed: u64,
    },

    /// An error raised inside a named pipeline stage.
    #[error("stage `{stage}`: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn cap(cap: &'static str, limit: u64, observed: u64) -> Self {
        Error::CapExceeded {
            cap,
            limit,
            observed,
        }
    }

    /// Innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_cap(&self) -> bool {
        matches!(self.root(), Error::CapExceeded { .. })
    }

    pub fn is_invalid(&self) -> bool {
        matches!(self.root(), Error::InvalidInput { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
