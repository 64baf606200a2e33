use thiserror::Error;

/// Error type for every fallible operation in the crate.
///
/// Each variant carries a stable kebab-case code (see [`Error::code`]) used in
/// reports and CLI diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty-sample: cannot build an empirical measure from zero observations")]
    EmptySample,
    #[error("space-mismatch: {0}")]
    SpaceMismatch(String),
    #[error("non-finite-integrand: integrand is not finite at {0}")]
    NonFiniteIntegrand(String),
    #[error("l21-divergent: {0}")]
    L21Divergent(String),
    #[error("invalid-measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid-cdf: {0}")]
    InvalidCdf(String),
    #[error("bad-length: {0}")]
    BadLength(String),
    #[error("bad-horizon: {0}")]
    BadHorizon(String),
    #[error("bad-model: {0}")]
    BadModel(String),
    #[error("posterior-unavailable: {0}")]
    PosteriorUnavailable(String),
    #[error("param-missing: no parameter for branch {0:?}")]
    ParamMissing(String),
    #[error("size-mismatch: {0}")]
    SizeMismatch(String),
    #[error("bad-marginals: {0}")]
    BadMarginals(String),
    #[error("solver-failure: {0}")]
    SolverFailure(String),
    #[error("bad-dudley-params: {0}")]
    BadDudleyParams(String),
    #[error("gamma-below-one: gamma = {0}")]
    GammaBelowOne(f64),
    #[error("bad-parameter: {0}")]
    BadParameter(String),
    #[error("config-error: {0}")]
    Config(String),
    #[error("io-error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptySample => "empty-sample",
            Error::SpaceMismatch(_) => "space-mismatch",
            Error::NonFiniteIntegrand(_) => "non-finite-integrand",
            Error::L21Divergent(_) => "l21-divergent",
            Error::InvalidMeasure(_) => "invalid-measure",
            Error::InvalidCdf(_) => "invalid-cdf",
            Error::BadLength(_) => "bad-length",
            Error::BadHorizon(_) => "bad-horizon",
            Error::BadModel(_) => "bad-model",
            Error::PosteriorUnavailable(_) => "posterior-unavailable",
            Error::ParamMissing(_) => "param-missing",
            Error::SizeMismatch(_) => "size-mismatch",
            Error::BadMarginals(_) => "bad-marginals",
            Error::SolverFailure(_) => "solver-failure",
            Error::BadDudleyParams(_) => "bad-dudley-params",
            Error::GammaBelowOne(_) => "gamma-below-one",
            Error::BadParameter(_) => "bad-parameter",
            Error::Config(_) => "config-error",
            Error::Io(_) => "io-error",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
