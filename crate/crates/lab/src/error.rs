use std::path::{Path, PathBuf};

pub type LabResult<T> = Result<T, LabError>;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("{0}")]
    Core(#[from] qgles_core::Error),
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error("missing stage `{stage}`: expected {}", path.display())]
    MissingStage { stage: &'static str, path: PathBuf },
    #[error("{0}")]
    Invalid(String),
}

impl LabError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, msg: impl Into<String>) -> Self {
        Self::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    /// Short category used in the one-line CLI error.
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Core(_) => "solver",
            Self::Config { .. } => "config",
            Self::Io { .. } => "io",
            Self::Format { .. } => "format",
            Self::MissingStage { .. } => "missing-stage",
            Self::Invalid(_) => "invalid",
        }
    }
}
