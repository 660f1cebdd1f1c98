use std::path::PathBuf;

/// Everything that ends a run early. The exit status depends on the variant.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Numeric(isor_core::Error),

    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<isor_core::Error> for CliError {
    fn from(e: isor_core::Error) -> Self {
        use isor_core::Error as E;
        match e {
            E::InvalidParameter(_) | E::UnknownPreset(_) | E::PlanarCase | E::NonPositiveInitialRho(_) => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}
