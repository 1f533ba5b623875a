use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category, used by the CLI to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("degenerate plotting design: regressors have zero variance")]
    DegenerateDesign,

    #[error("least-squares slope is {0}, expected a positive value")]
    NonPositiveSlope(f64),

    #[error("optimizer did not converge after {iterations} iterations (last iterate alpha={alpha}, beta={beta})")]
    NonConvergence {
        iterations: usize,
        alpha: f64,
        beta: f64,
    },

    #[error("optimizer ran to the parameter boundary (alpha={alpha}, beta={beta})")]
    Boundary { alpha: f64, beta: f64 },

    #[error("observed information is singular (condition number {0:e})")]
    SingularInformation(f64),

    #[error("pivotal draws rejected too often: {rejected} rejections for {accepted} accepted draws")]
    TooManyRejections { rejected: usize, accepted: usize },

    #[error("bootstrap run flagged: {failures} refit failures over {reps} resamples")]
    FlaggedBootstrap { failures: usize, reps: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Usage,
            Error::InvalidSample(_) | Error::Parse { .. } | Error::Io(_) => ErrorKind::Data,
            Error::Domain(_) | Error::InvalidParams(_) => ErrorKind::Usage,
            Error::DegenerateDesign
            | Error::NonPositiveSlope(_)
            | Error::NonConvergence { .. }
            | Error::Boundary { .. }
            | Error::SingularInformation(_)
            | Error::TooManyRejections { .. }
            | Error::FlaggedBootstrap { .. } => ErrorKind::Numerical,
        }
    }
}
