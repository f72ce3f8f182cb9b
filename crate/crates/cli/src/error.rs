use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("line {line}: invalid value for `{key}`: {message}")]
    Value { line: usize, key: &'static str, message: String },
    #[error("invalid `{field}`: {message}")]
    Invalid { field: &'static str, message: String },
}

impl ConfigError {
    /// The offending key, when there is one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Self::Syntax { .. } => None,
            Self::UnknownKey { key, .. } | Self::DuplicateKey { key, .. } => Some(key),
            Self::Missing(key) | Self::Value { key, .. } | Self::Invalid { field: key, .. } => Some(key),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown preset `{0}` (see `freemin presets`)")]
    UnknownPreset(String),
    #[error("solver failed: {0}")]
    Solver(#[from] freemin_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {message}")]
    BadTrace { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// 2 for configuration problems, 3 for solver failures, 4 for I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::UnknownPreset(_) => 2,
            Self::Solver(_) => 3,
            Self::Io { .. } | Self::BadTrace { .. } => 4,
        }
    }
}
