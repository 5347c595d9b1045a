use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),

    #[error("unsupported wav encoding: {0}")]
    UnsupportedEncoding(String),

    #[error("annotation line {line}: {message}")]
    Annotation { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid audio: {0}")]
    InvalidAudio(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("feature mismatch: model expects [{expected}], got [{got}]")]
    FeatureMismatch { expected: String, got: String },

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("model format error: {0}")]
    Format(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    /// Stable short code, used as the prefix of CLI diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "E-IO",
            Error::Wav(_) => "E-WAV",
            Error::UnsupportedEncoding(_) => "E-WAV-ENCODING",
            Error::Annotation { .. } => "E-ANNOTATION",
            Error::InvalidArgument(_) => "E-ARGUMENT",
            Error::InvalidAudio(_) => "E-AUDIO",
            Error::Degenerate(_) => "E-DEGENERATE",
            Error::FeatureMismatch { .. } => "E-FEATURES",
            Error::Divergence { .. } => "E-DIVERGENCE",
            Error::Parse(_) => "E-PARSE",
            Error::Format(_) => "E-MODEL",
        }
    }
}
