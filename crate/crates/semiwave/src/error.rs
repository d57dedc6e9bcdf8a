use std::path::PathBuf;

/// Failure of a run, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Unreadable or invalid configuration or input data.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical operation rejected its input.
    #[error("numeric error in {module}::{}: {source}", source.op())]
    Numeric {
        module: &'static str,
        #[source]
        source: semiwave_core::Error,
    },

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl AppError {
    /// 1 for configuration problems, 2 for numeric or output failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 1,
            AppError::Numeric { source, .. } if source.is_config() => 1,
            AppError::Numeric { .. } | AppError::Output { .. } => 2,
        }
    }

    pub(crate) fn output(path: impl Into<PathBuf>, source: impl Into<std::io::Error>) -> Self {
        AppError::Output {
            path: path.into(),
            source: source.into(),
        }
    }
}

/// Tags core errors with the module that raised them.
pub(crate) trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, AppError>;
}

impl<T> InModule<T> for Result<T, semiwave_core::Error> {
    fn in_module(self, module: &'static str) -> Result<T, AppError> {
        self.map_err(|source| AppError::Numeric { module, source })
    }
}
