use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("missing key: {0}")]
    MissingKey(String),

    #[error("malformed number for {key}: `{value}`")]
    MalformedNumber { key: String, value: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("perturbation exceeds density: sum of n_tilde {sum} >= n0 {n0}")]
    PerturbationExceedsDensity { sum: f64, n0: f64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("numerical error: {0}")]
    Numerical(oamproca_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingKey(_) | CliError::MalformedNumber { .. } | CliError::Config(_) => 2,
            CliError::PerturbationExceedsDensity { .. } => 3,
            CliError::Io { .. } => 4,
            CliError::Numerical(_) => 5,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<oamproca_core::Error> for CliError {
    fn from(e: oamproca_core::Error) -> Self {
        match e {
            oamproca_core::Error::PerturbationExceedsDensity { sum, n0 } => {
                CliError::PerturbationExceedsDensity { sum, n0 }
            }
            oamproca_core::Error::InvalidProfile(msg) => CliError::Config(msg),
            other => CliError::Numerical(other),
        }
    }
}
