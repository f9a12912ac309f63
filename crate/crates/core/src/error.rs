use thiserror::Error;

/// Every failure the library can report. Genericity-class variants are retried
/// with a seeded perturbation by the top-level evaluators; the rest are final.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    #[error("four lines admit infinitely many transversals: {0}")]
    InfiniteFamily(String),
    #[error("tangency ambiguity: {0}")]
    TangencyAmbiguity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid knot: {0}")]
    InvalidKnot(String),
    #[error("genericity failure: {0}")]
    GenericityFailure(String),
    #[error("degenerate hull: {0}")]
    DegenerateHull(String),
    #[error("non-generic projection: {0}")]
    NonGenericProjection(String),
    #[error("non-transverse crossing: {0}")]
    NonTransverse(String),
    #[error("non-integral sum: {numerator} is not divisible by {denominator}")]
    NonIntegralSum { numerator: i64, denominator: i64 },
    #[error("seed resolution failure: {0}")]
    SeedResolutionFailure(String),
    #[error("continuation stalled: {0}")]
    ContinuationStall(String),
    #[error("unconsumed seed: {0}")]
    UnconsumedSeed(String),
    #[error("zero curvature: {0}")]
    ZeroCurvature(String),
    #[error("curve left the domain through an unexpected face: {0}")]
    BoundaryViolation(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("cross-method disagreement: {0}")]
    Disagreement(String),
}

impl Error {
    /// Whether a small generic perturbation of the input can plausibly clear the error.
    pub fn is_genericity(&self) -> bool {
        matches!(
            self,
            Error::DegenerateConfiguration(_)
                | Error::InfiniteFamily(_)
                | Error::TangencyAmbiguity(_)
                | Error::GenericityFailure(_)
                | Error::NonGenericProjection(_)
                | Error::NonTransverse(_)
        )
    }

    /// Stable short name, used in reports and for exit-code mapping.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateConfiguration(_) => "DegenerateConfiguration",
            Error::InfiniteFamily(_) => "InfiniteFamily",
            Error::TangencyAmbiguity(_) => "TangencyAmbiguity",
            Error::Parse(_) => "ParseError",
            Error::InvalidKnot(_) => "InvalidKnot",
            Error::GenericityFailure(_) => "GenericityFailure",
            Error::DegenerateHull(_) => "DegenerateHull",
            Error::NonGenericProjection(_) => "NonGenericProjection",
            Error::NonTransverse(_) => "NonTransverse",
            Error::NonIntegralSum { .. } => "NonIntegralSum",
            Error::SeedResolutionFailure(_) => "SeedResolutionFailure",
            Error::ContinuationStall(_) => "ContinuationStall",
            Error::UnconsumedSeed(_) => "UnconsumedSeed",
            Error::ZeroCurvature(_) => "ZeroCurvature",
            Error::BoundaryViolation(_) => "BoundaryViolation",
            Error::Unsupported(_) => "Unsupported",
            Error::Disagreement(_) => "Disagreement",
        }
    }

    /// Process exit code for the CLI. Distinct per kind; 0 and 1 are reserved.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::InvalidKnot(_) => 3,
            Error::DegenerateConfiguration(_) => 4,
            Error::InfiniteFamily(_) => 5,
            Error::TangencyAmbiguity(_) => 6,
            Error::GenericityFailure(_) => 7,
            Error::DegenerateHull(_) => 8,
            Error::NonGenericProjection(_) => 9,
            Error::NonTransverse(_) => 10,
            Error::NonIntegralSum { .. } => 11,
            Error::SeedResolutionFailure(_) => 12,
            Error::ContinuationStall(_) => 13,
            Error::UnconsumedSeed(_) => 14,
            Error::ZeroCurvature(_) => 15,
            Error::BoundaryViolation(_) => 16,
            Error::Unsupported(_) => 17,
            Error::Disagreement(_) => 18,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
