/// Failure of a command, carrying its exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or malformed input, bad flags, domain violations.
    #[error("input error: {0}")]
    Input(String),
    /// A numerical method did not reach its tolerance.
    #[error("numerical failure: {0}")]
    Numeric(String),
    /// Some points of a sweep failed; the remaining rows are still written.
    #[error("numerical failure: {reason}")]
    Partial { report: String, reason: String },
    /// The two limit classifications disagree; the report is still produced.
    #[error("unresolved classification: {reason}")]
    Unresolved { report: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) | CliError::Partial { .. } => 3,
            CliError::Unresolved { .. } => 4,
        }
    }

    /// Output that is written despite the failure.
    pub fn report(&self) -> Option<&str> {
        match self {
            CliError::Partial { report, .. } | CliError::Unresolved { report, .. } => Some(report),
            _ => None,
        }
    }
}

impl From<ergodic_core::Error> for CliError {
    fn from(e: ergodic_core::Error) -> CliError {
        match e {
            ergodic_core::Error::Numeric(m) => CliError::Numeric(m),
            ergodic_core::Error::Input(m) => CliError::Input(m),
            ergodic_core::Error::Domain(m) => CliError::Input(format!("outside the domain: {m}")),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> CliError {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::Input(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
