use serde_json::Value;

/// Errors surfaced by commands, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A probe or memory budget ran out; the payload is a partial report.
    #[error("budget exhausted: {message}")]
    Budget { message: String, report: Value },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 2,
            CliError::Budget { .. } => 3,
            CliError::Input(_) => 4,
        }
    }

    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn invariant(e: impl std::fmt::Display) -> Self {
        CliError::Invariant(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
