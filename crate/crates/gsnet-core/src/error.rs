use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("distribution undefined: {0}")]
    UndefinedDistribution(String),
    #[error("graph generation failed: {0}")]
    Generation(String),
    #[error("purification diverged: {0}")]
    PurificationDiverged(String),
    #[error("input too noisy: {0}")]
    InputTooNoisy(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("invalid correlator spec: {0}")]
    Spec(String),
    #[error("unsupported mode: {0}")]
    Unsupported(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("singular series: denominator vanishes at z = 0")]
    SingularSeries,
    #[error("substituted value outside the domain: {0}")]
    Domain(String),
    #[error("mean-field solver found no fixed point (residual {residual:e})")]
    NoFixedPoint { residual: f64 },
    #[error("degenerate measurement on qubit {0}")]
    DegenerateMeasurement(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
