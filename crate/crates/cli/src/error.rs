use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const OTHER: u8 = 1;
    pub const VALIDATION: u8 = 3;
    pub const COVERAGE: u8 = 4;
    pub const ILL_POSED: u8 = 5;
    pub const NON_INJECTIVE: u8 = 6;
    pub const TRAPPING: u8 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed or inconsistent scene file.
    #[error("{0}")]
    Scene(String),
    /// Malformed data file.
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Core(#[from] mwxray::Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use mwxray::Error as E;
        match self {
            CliError::Scene(_) | CliError::Data(_) => exit::VALIDATION,
            CliError::Io { .. } | CliError::Csv(_) => exit::OTHER,
            CliError::Core(e) => match e {
                E::Config(_)
                | E::InvalidTiling(_)
                | E::DegenerateTriangle(_)
                | E::OutsideDomain { .. }
                | E::ExitBeforeOffset { .. }
                | E::NotConvex { .. } => exit::VALIDATION,
                E::Coverage { .. } => exit::COVERAGE,
                E::IllPosedStep { .. } | E::IllPosedSampling(_) | E::NearInfiniteChord { .. } => {
                    exit::ILL_POSED
                }
                E::NonInjectiveWeight { .. } => exit::NON_INJECTIVE,
                E::TrappingSuspected { .. } => exit::TRAPPING,
            },
        }
    }
}
