use burstopt::BurstError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Solver(#[from] BurstError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 usage, 3 input, 4 domain, 5 infeasible, 6 capacity, 7 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Solver(BurstError::Domain(_) | BurstError::LengthMismatch { .. }) => 4,
            CliError::Solver(BurstError::Infeasible) => 5,
            CliError::Solver(BurstError::Capacity(_)) => 6,
            CliError::Io(_) => 7,
        }
    }
}
