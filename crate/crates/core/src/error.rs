use thiserror::Error;

/// Errors produced by the inference library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A summary or configuration failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("insufficient data: {n} observations for {d} parameters")]
    InsufficientData { n: usize, d: usize },

    /// The design matrix is rank deficient after adding the intercept.
    #[error("singular design: column {column} is linearly dependent on earlier columns")]
    SingularDesign { column: usize },

    #[error("weight matrix is not symmetric positive definite: {0}")]
    WeightMatrix(String),

    /// The fitted standard deviation of a coefficient is zero, so the
    /// pivotal quantity is undefined.
    #[error("degenerate fit: sigma_hat[{index}] = {sigma}")]
    DegenerateFit { index: usize, sigma: f64 },

    /// A numerical routine failed to converge.
    #[error("numeric failure in {routine}: {detail}")]
    Numeric {
        routine: &'static str,
        detail: String,
    },

    #[error("at cutoff {cutoff}: {source}")]
    AtCutoff { cutoff: f64, source: Box<Error> },

    #[error("replicate {replicate} (n = {n}): {source}")]
    AtReplicate {
        n: usize,
        replicate: usize,
        source: Box<Error>,
    },
}

impl Error {
    /// Strips cutoff/replicate context and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtCutoff { source, .. } | Error::AtReplicate { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numeric(routine: &'static str, detail: impl Into<String>) -> Self {
        Error::Numeric {
            routine,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
