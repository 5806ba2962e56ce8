use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("empty sample")]
    EmptySample,

    #[error("insufficient points: need {needed} candidates, have {available}")]
    InsufficientPoints { needed: usize, available: usize },

    #[error("matrix is not positive definite (pivot {pivot}) even after jitter")]
    NotPositiveDefinite { pivot: usize },

    #[error("degenerate variance: {dropped} of {n} denominators at or below the floor")]
    DegenerateVariance { dropped: usize, n: usize },

    #[error("degenerate population variance at y index {index} ({point})")]
    DegeneratePopulationVariance { index: usize, point: String },

    #[error("size guard exceeded: n = {n} > {limit}")]
    GuardExceeded { n: usize, limit: usize },

    #[error("statistic requires scalar X and Y")]
    NotScalar,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid joint distribution: {0}")]
    InvalidJoint(String),

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("missing value at row {row}, column {column}")]
    MissingValue { row: usize, column: String },

    #[error("column {0} is constant and cannot be standardized")]
    ConstantColumn(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidRotation(_) => "InvalidRotation",
            Error::InvalidKernel(_) => "InvalidKernel",
            Error::DegenerateSample(_) => "DegenerateSample",
            Error::EmptySample => "EmptySample",
            Error::InsufficientPoints { .. } => "InsufficientPoints",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::DegenerateVariance { .. } => "DegenerateVariance",
            Error::DegeneratePopulationVariance { .. } => "DegeneratePopulationVariance",
            Error::GuardExceeded { .. } => "GuardExceeded",
            Error::NotScalar => "NotScalar",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::InvalidJoint(_) => "InvalidJoint",
            Error::Parse { .. } => "ParseError",
            Error::MissingValue { .. } => "MissingValue",
            Error::ConstantColumn(_) => "ConstantColumn",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
