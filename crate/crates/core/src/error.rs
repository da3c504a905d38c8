use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular")]
    Singular,
    #[error("could not recognize {0} as a rational number")]
    ReconstructionFailed(String),
    #[error("eta product has non-integral or negative leading exponent {0}/24")]
    NonIntegralLeadingExponent(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("network error: {0}")]
    Network(String),
    #[error("unsupported orbit: {0}")]
    UnsupportedOrbit(String),
    #[error("orbit not found: {0}")]
    OrbitNotFound(String),
    #[error("insufficient terms: need {needed}, have {available}")]
    InsufficientTerms { needed: usize, available: usize },
    #[error("period lattice is rank deficient")]
    RankDeficient,
    #[error("non-integral lattice coordinate {0}")]
    NonIntegralCoordinate(String),
    #[error("no polarization found: {0}")]
    NoPolarizationFound(String),
    #[error("degenerate alternating form")]
    DegenerateForm,
    #[error("could not orient the period matrix")]
    OrientationUnfixable,
    #[error("point is within tolerance of the theta divisor (|theta|/scale = {0:e})")]
    NearThetaDivisor(f64),
    #[error("quasi-periods were not supplied")]
    MissingQuasiPeriods,
    #[error("pole on the sampling horocycle at height {0}")]
    PoleOnHorocycle(f64),
    #[error("extractions at two heights disagree by {0:e}")]
    InconsistentExtraction(f64),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short variant name, used by the CLI and in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::Singular => "Singular",
            Error::ReconstructionFailed(_) => "ReconstructionFailed",
            Error::NonIntegralLeadingExponent(_) => "NonIntegralLeadingExponent",
            Error::Parse(_) => "ParseError",
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::Network(_) => "NetworkError",
            Error::UnsupportedOrbit(_) => "UnsupportedOrbit",
            Error::OrbitNotFound(_) => "OrbitNotFound",
            Error::InsufficientTerms { .. } => "InsufficientTerms",
            Error::RankDeficient => "RankDeficient",
            Error::NonIntegralCoordinate(_) => "NonIntegralCoordinate",
            Error::NoPolarizationFound(_) => "NoPolarizationFound",
            Error::DegenerateForm => "DegenerateForm",
            Error::OrientationUnfixable => "OrientationUnfixable",
            Error::NearThetaDivisor(_) => "NearThetaDivisor",
            Error::MissingQuasiPeriods => "MissingQuasiPeriods",
            Error::PoleOnHorocycle(_) => "PoleOnHorocycle",
            Error::InconsistentExtraction(_) => "InconsistentExtraction",
            Error::Io(_) => "Io",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
