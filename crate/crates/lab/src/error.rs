use std::path::PathBuf;

pub const EXIT_OK: u8 = 0;
pub const EXIT_TOLERANCE: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("solver: {0}")]
    Solver(steklov_core::Error),
}

impl LabError {
    pub fn exit_code(&self) -> u8 {
        match self {
            LabError::Config(_) | LabError::Io { .. } => EXIT_CONFIG,
            LabError::Solver(_) => EXIT_SOLVER,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io { path: path.into(), source }
    }
}

impl From<steklov_core::Error> for LabError {
    fn from(e: steklov_core::Error) -> Self {
        match e {
            // bad sizes, radii, counts: these come straight from the config
            steklov_core::Error::InvalidInput(msg) => LabError::Config(msg),
            other => LabError::Solver(other),
        }
    }
}

pub type LabResult<T> = Result<T, LabError>;
