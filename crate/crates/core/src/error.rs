use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration failure: {0}")]
    IntegrationFailure(String),

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("degenerate metric at s = {s} (EG - F^2 = {det:e})")]
    DegenerateMetric { s: f64, det: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-manifold mesh: {0}")]
    NonManifold(String),

    #[error("monodromy is undefined for the degenerate period (tau = 1)")]
    DegeneratePeriod,

    #[error("mode j = {j} is {classification}, no exponential splitting")]
    NotHyperbolic { j: u32, classification: String },

    #[error("window of length {length} is too short (need at least {required})")]
    WindowTooShort { length: f64, required: f64 },

    #[error("boundary data has nonzero mean (mode 0 = {0:e})")]
    NonzeroMean(f64),

    #[error("boundary data contains forbidden low mode n = {0}")]
    LowModePresent(i32),

    #[error("root finding failed: {0}")]
    RootFindFailure(String),

    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable kind, used in CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::IntegrationFailure(_) => "integration-failure",
            Error::QuadratureFailure(_) => "quadrature-failure",
            Error::DegenerateMetric { .. } => "degenerate-metric",
            Error::InvalidGrid(_) => "invalid-grid",
            Error::NonManifold(_) => "non-manifold-input",
            Error::DegeneratePeriod => "degenerate-period",
            Error::NotHyperbolic { .. } => "not-hyperbolic",
            Error::WindowTooShort { .. } => "window-too-short",
            Error::NonzeroMean(_) => "nonzero-mean",
            Error::LowModePresent(_) => "low-mode-present",
            Error::RootFindFailure(_) => "root-find-failure",
            Error::TruncationMismatch(..) => "truncation-mismatch",
            Error::ParameterOutOfRange(_) => "parameter-out-of-range",
            Error::GridTooCoarse(_) => "grid-too-coarse",
            Error::Parse(_) => "parse-error",
            Error::Io(_) => "io-failure",
            Error::Json(_) => "io-failure",
        }
    }
}
