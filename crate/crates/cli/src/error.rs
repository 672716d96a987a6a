use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("invalid document: {0}")]
    Document(String),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] noisyor::Error),
}

impl CliError {
    /// 1 for domain errors, 2 for usage and parse errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn parse(path: &str, err: serde_json::Error) -> Self {
        let mut message = err.to_string();
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        CliError::Parse {
            path: path.to_string(),
            line: err.line(),
            column: err.column(),
            message,
        }
    }
}
