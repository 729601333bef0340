use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("could not parse model: {0}")]
    Parse(String),
    #[error("the random sum is degenerate (sigma^2 = 0 or c = 0)")]
    DegenerateSum,
    #[error("index law has zero mean; size biasing is undefined")]
    ZeroMean,
    #[error("support is unbounded and cannot be certified: {0}")]
    UnboundedSupport(String),
    #[error("coupling `{kind}` is not available for index `{index}`")]
    IncompatibleKind { kind: String, index: String },
    #[error("exact coupling statistics unavailable: {0}")]
    ExactUnavailable(String),
    #[error("law is not centered (mean {0:e})")]
    NotCentered(f64),
    #[error("law has zero variance")]
    ZeroVariance,
    #[error("sample is empty")]
    EmptySample,
    #[error("sample of {0} values exceeds the memory cap")]
    SampleTooLarge(usize),
    #[error("quadrature did not reach its error target: {0}")]
    QuadratureFailure(String),
    #[error("statistic `{0}` is missing or not finite")]
    MissingStatistic(&'static str),
    #[error("coupling has P(D<0) = {0:e}; use the general Kolmogorov bound")]
    NegativeDPresent(f64),
    #[error("summand mean is {0:e}, expected zero")]
    NonzeroMean(f64),
    #[error("no specialized bound for {0}")]
    NoSpecialization(String),
    #[error("deconvolution of the size-biased law failed: {0}")]
    Deconvolution(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
