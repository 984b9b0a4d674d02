use thiserror::Error;

/// Failures surfaced to the user, each with a stable machine-readable code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Library(#[from] exceedance::Error),
}

impl CliError {
    /// Process exit status: 2 bad input, 3 degenerate fit, 4 numeric failure.
    pub fn exit_code(&self) -> u8 {
        use exceedance::Error as E;
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Library(e) => match e.root() {
                E::InsufficientData { .. } | E::SingularDesign { .. } | E::DegenerateFit { .. } => {
                    3
                }
                E::Numeric { .. } => 4,
                _ => 2,
            },
        }
    }

    /// Code printed after the `EP-ERR:` prefix.
    pub fn code(&self) -> &'static str {
        use exceedance::Error as E;
        match self {
            CliError::Input(_) => "input",
            CliError::Io(_) => "io",
            CliError::Library(e) => match e.root() {
                E::Domain(_) | E::Validation(_) => "input",
                E::WeightMatrix(_) => "weight_matrix",
                E::InsufficientData { .. } => "insufficient_data",
                E::SingularDesign { .. } => "singular_design",
                E::DegenerateFit { .. } => "degenerate_fit",
                E::Numeric { .. } => "numeric",
                E::AtCutoff { .. } | E::AtReplicate { .. } => "numeric",
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}
