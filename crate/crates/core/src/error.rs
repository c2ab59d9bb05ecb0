use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every variant carries the `module::operation` that raised it.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied a value that violates an operation's precondition.
    #[error("{op}: invalid input: {msg}")]
    InvalidInput { op: &'static str, msg: String },

    /// The physics has no answer for the request (e.g. not phase-matchable).
    #[error("{op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A numerical guard tripped (aliasing, NaN, step cap).
    #[error("{op}: numerical guard: {msg}")]
    Numerical { op: &'static str, msg: String },

    #[error("config: {0}")]
    Config(String),

    #[error("setting '{label}': {source}")]
    Setting {
        label: String,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InvalidInput {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn numerical(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Numerical {
            op,
            msg: msg.into(),
        }
    }

    pub(crate) fn in_setting(self, label: &str) -> Self {
        Error::Setting {
            label: label.to_string(),
            source: Box::new(self),
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput { .. } | Error::Config(_) => 2,
            Error::Domain { .. } => 3,
            Error::Numerical { .. } => 4,
            Error::Setting { source, .. } => source.exit_code(),
            Error::Io(_) => 1,
        }
    }
}
