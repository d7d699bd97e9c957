use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Engine(#[from] coloc_core::Error),
    /// The run finished but a verification it performs came out false.
    #[error("{0} verification(s) failed")]
    Unverified(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use coloc_core::Error as E;
        match self {
            CliError::Validation(_) | CliError::Io { .. } => 2,
            CliError::Engine(e) => match e {
                E::StabilizationNotReached { .. } => 3,
                E::NotCollapsed(_) | E::CornerNotResolvable(_) => 4,
                E::InhomogeneousElement(_)
                | E::Parse(_)
                | E::InvalidInput(_)
                | E::InvalidAction(_)
                | E::WindowTooSmall(_) => 2,
                E::NotAComplex => 1,
            },
            CliError::Unverified(_) => 1,
        }
    }
}
