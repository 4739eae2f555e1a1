use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A malformed input record. `line` is 1-based and counts the header.
    #[error("{source_name}:{line}: {column}: {reason}")]
    Parse {
        source_name: String,
        line: u64,
        column: String,
        reason: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("[{module}] {source}")]
    Engine {
        module: &'static str,
        #[source]
        source: basel_core::Error,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("a disclosure period is required (e.g. 2006-H2)")]
    MissingPeriod,
}

impl CliError {
    pub fn engine(module: &'static str) -> impl FnOnce(basel_core::Error) -> CliError {
        move |source| CliError::Engine { module, source }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
