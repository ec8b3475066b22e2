use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("invalid manifest: {0}")]
    Validation(String),
    #[error(transparent)]
    Solver(#[from] homlat::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("image output: {0}")]
    Image(#[from] image::ImageError),
    #[error("self-test failed: {0}")]
    SelfTest(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 2 for manifest problems, 3 when the solver did
    /// not converge, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 2,
            CliError::Solver(homlat::Error::NotConverged { .. }) => 3,
            CliError::Solver(homlat::Error::InvalidSpec(_))
            | CliError::Solver(homlat::Error::InvalidGeometry(_))
            | CliError::Solver(homlat::Error::InvalidMaterial(_))
            | CliError::Solver(homlat::Error::ZeroDeterminant)
            | CliError::Solver(homlat::Error::MalformedMatrix { .. }) => 2,
            _ => 1,
        }
    }
}
