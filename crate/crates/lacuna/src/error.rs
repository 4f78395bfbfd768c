use std::path::PathBuf;

/// Failures of the front end. Core failures are wrapped unchanged.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing field `{0}`")]
    MissingField(String),
    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
    #[error("unknown algebra `{0}`: neither a file nor a built-in name")]
    UnknownAlgebra(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{} already holds results; pass --force to overwrite", .0.display())]
    Clobber(PathBuf),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] lacuna_core::Error),
}

impl CliError {
    /// Short machine-readable name used in error records.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse_error",
            CliError::MissingField(_) => "missing_field",
            CliError::UnknownExperiment(_) => "unknown_experiment",
            CliError::UnknownAlgebra(_) => "unknown_algebra",
            CliError::Invalid(_) => "invalid_argument",
            CliError::Clobber(_) => "output_exists",
            CliError::Io { .. } => "io_error",
            CliError::Core(_) => "computation_error",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Classifies a JSON error: a missing field is reported as such, anything
    /// else (including unknown keys) as a parse error with its position.
    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        let message = e.to_string();
        if let Some(rest) = message.strip_prefix("missing field `") {
            if let Some(end) = rest.find('`') {
                return CliError::MissingField(rest[..end].to_string());
            }
        }
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        CliError::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
