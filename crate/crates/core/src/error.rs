use std::path::PathBuf;

use crate::thesaurus::DescriptorCode;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unknown descriptor code {0}")]
    UnknownCode(DescriptorCode),

    #[error("unknown language {0:?}")]
    UnknownLanguage(String),

    #[error("language mismatch: expected {expected:?}, found {found:?}")]
    LanguageMismatch { expected: String, found: String },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("descriptor {0} has no training documents")]
    EmptySubset(DescriptorCode),

    #[error("no descriptor has any training document")]
    NoTrainableDescriptor,

    #[error("idf undefined for lemma {0:?} with document frequency 0")]
    UndefinedIdf(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no length model entry for {src}->{tgt}")]
    MissingLanguagePair { src: String, tgt: String },

    #[error("empty candidate set")]
    EmptyCandidates,

    #[error("need at least 2 translation pairs, got {0}")]
    InsufficientPairs(usize),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),

    #[error("experiment mode {mode} cannot run: {reason}")]
    ModeMismatch { mode: String, reason: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by the filesystem rather than by content.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_string(path: &std::path::Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}
