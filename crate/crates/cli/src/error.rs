use thiserror::Error;

/// Failures of a CLI command, each with a fixed process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("rank-deficient constraint matrix: {0}")]
    RankDeficient(String),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
    #[error("escalation mismatch: {0}")]
    EscalationMismatch(String),
    #[error("solver failure: {0}")]
    Solver(ldilp::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Malformed(_) => 1,
            CliError::RankDeficient(_) => 2,
            CliError::OracleMismatch(_) => 3,
            CliError::EscalationMismatch(_) => 4,
            CliError::Solver(_) => 5,
        }
    }
}

impl From<ldilp::Error> for CliError {
    fn from(e: ldilp::Error) -> Self {
        match e {
            ldilp::Error::RankDeficient { .. } => CliError::RankDeficient(e.to_string()),
            ldilp::Error::EscalationMismatch(m) => CliError::EscalationMismatch(m),
            ldilp::Error::InvalidShape(_) | ldilp::Error::DimMismatch(..) => {
                CliError::Malformed(e.to_string())
            }
            e => CliError::Solver(e),
        }
    }
}
