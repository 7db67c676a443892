use thiserror::Error;
use vfp_core::VfpError;

/// Failures grouped by process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("domain failure: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Domain(_) => 1,
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
        }
    }
}

impl From<VfpError> for CliError {
    fn from(e: VfpError) -> Self {
        use VfpError::*;
        let msg = e.to_string();
        match e {
            InvalidSpec(_) | InvalidParameter(_) | GridTooCoarse { .. } => Self::Config(msg),
            InvalidPotential(_)
            | NotInPotentialClass(_)
            | ConditionViolated(_)
            | UnboundedSup { .. }
            | NoTransition { .. } => Self::Domain(msg),
            NonConvergence { .. }
            | NonFinite { .. }
            | RootFindingFailure(_)
            | BracketExhausted { .. }
            | NoConvergence { .. }
            | DivergentIntegrand(_)
            | NoSignChange { .. }
            | BlowUp { .. } => Self::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::Numerical(format!("i/o: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Numerical(format!("csv: {e}"))
    }
}
