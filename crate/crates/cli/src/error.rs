use rydberg_cavity_core::{Error as CoreError, ErrorKind};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{origin}:{line}: cannot parse `{text}` (expected key = value)")]
    Syntax { origin: String, line: usize, text: String },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("missing key: {0}")]
    MissingKey(String),
    #[error("{0}")]
    Invalid(CoreError),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{origin}:{line}: {source}")]
    At { origin: String, line: usize, source: Box<ConfigError> },
    #[error("{0}")]
    Usage(String),
}

impl ConfigError {
    pub(crate) fn at(self, origin: &str, line: usize) -> Self {
        ConfigError::At { origin: origin.to_string(), line, source: Box::new(self) }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("{context}: {source}")]
    Core { context: String, source: CoreError },
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        CliError::Core { context: context.into(), source }
    }

    /// 0 success, 1 config error, 2 physics-domain error, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Io(_) => 3,
            CliError::Core { source, .. } => match source.kind() {
                ErrorKind::Config => 1,
                ErrorKind::Physics => 2,
                ErrorKind::Numerical => 3,
            },
        }
    }
}
