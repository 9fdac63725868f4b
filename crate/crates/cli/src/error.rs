use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error(transparent)]
    Core(#[from] carleman_core::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 = a check failed, 2 = usage or configuration, 3 = numerical failure.
    pub fn exit_code(&self) -> i32 {
        use carleman_core::Error as E;
        match self {
            CliError::Usage(_) | CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Core(e) => match e {
                E::ToleranceExceeded { .. } | E::VerificationFailure { .. } | E::RepairInfeasible { .. } => 1,
                E::InvalidParameter(_) | E::RingOutsideWindow { .. } | E::Io(_) | E::Json(_) => 2,
                E::NonFinite { .. }
                | E::DegenerateFit
                | E::InsufficientData { .. }
                | E::Overflow { .. }
                | E::SolverDivergence { .. }
                | E::ZeroObservation { .. }
                | E::SupportViolation { .. }
                | E::DyadicOverflow => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
