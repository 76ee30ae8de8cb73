use std::path::{Path, PathBuf};

use ctrwkit_core::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    UnknownKey(String),
    #[error("cannot parse expression `{expr}`: {msg}")]
    Expr { expr: String, msg: String },
    #[error("cannot read {}: {msg}", path.display())]
    Read { path: PathBuf, msg: String },
    #[error("cannot write {}: {msg}", path.display())]
    Write { path: PathBuf, msg: String },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn tag(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.tag(),
            CliError::Config(_) => "CONFIG_INVALID",
            CliError::UnknownKey(_) => "CONFIG_UNKNOWN_KEY",
            CliError::Expr { .. } => "EXPR_PARSE",
            CliError::Read { .. } => "IO_READ",
            CliError::Write { .. } => "IO_WRITE",
            CliError::Format { .. } => "DATA_FORMAT",
        }
    }

    /// 2 for anything wrong with the inputs, 3 for runtime and data failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) => 3,
            CliError::Config(_) | CliError::UnknownKey(_) | CliError::Expr { .. } => 2,
            CliError::Read { .. } | CliError::Write { .. } | CliError::Format { .. } => 3,
        }
    }

    /// `TAG: message` on one line.
    pub fn line(&self) -> String {
        let msg: String = self.to_string().split_whitespace().collect::<Vec<_>>().join(" ");
        format!("{}: {}", self.tag(), msg)
    }

    pub(crate) fn read(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Read { path: path.to_path_buf(), msg: e.to_string() }
    }

    pub(crate) fn write(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Write { path: path.to_path_buf(), msg: e.to_string() }
    }

    pub(crate) fn format(path: &Path, e: impl std::fmt::Display) -> Self {
        CliError::Format { path: path.to_path_buf(), msg: e.to_string() }
    }
}

pub(crate) fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}
