use gsco_core::GscoError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Refused(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// 0 ok, 1 io, 2 config, 3 numeric, 4 cap/size refusal.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Refused(_) => 4,
        }
    }
}

impl From<GscoError> for CliError {
    fn from(e: GscoError) -> Self {
        let msg = e.to_string();
        match e {
            GscoError::Numeric { .. } | GscoError::DegenerateDirection => CliError::Numeric(msg),
            GscoError::CapExceeded { .. } => CliError::Refused(msg),
            GscoError::Io(_) => CliError::Io(msg),
            GscoError::Parse { .. }
            | GscoError::Range { .. }
            | GscoError::SelfLoop { .. }
            | GscoError::Config(_)
            | GscoError::Dimension { .. }
            | GscoError::Generation(_) => CliError::Config(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
