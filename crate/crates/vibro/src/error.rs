use std::path::PathBuf;

/// Failure of a pipeline step, classified for the process exit code.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] vibro_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, RunError>;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

impl RunError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io { path: path.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use vibro_core::Error as E;
        match self {
            RunError::Config(_) => EXIT_CONFIG,
            RunError::Core(e) => match root(e) {
                E::Validation(_) | E::Geometry(_) | E::Infeasible(_) | E::NonColinear(_) => EXIT_CONFIG,
                _ => EXIT_SOLVER,
            },
            RunError::Verification(_) => EXIT_VERIFICATION,
            RunError::Io { .. } | RunError::Csv(_) | RunError::Json(_) => EXIT_SOLVER,
        }
    }
}

fn root(e: &vibro_core::Error) -> &vibro_core::Error {
    match e {
        vibro_core::Error::AtFrequency { source, .. } => root(source),
        other => other,
    }
}
