use thiserror::Error;

use crate::series::Truncation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("truncation mismatch: {0} vs {1}")]
    TruncationMismatch(Truncation, Truncation),
    #[error("substituted series must have zero constant term")]
    NonZeroConstant,
    #[error("series has empty support")]
    EmptySupport,
    #[error("weights ({0},{1}) must be positive and coprime")]
    InvalidWeighting(u32, u32),
    #[error("series is not divisible by the requested power")]
    NotDivisible,
    #[error("series is not a unit")]
    NotUnit,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("map germ does not fix the origin")]
    NotAtOrigin,
    #[error("family curves are not immersed at the base point")]
    NotImmersedFiber,
    #[error("support curve is not immersed")]
    SingularSupport,
    #[error("family curves are not tangent to the support (fails at xi-order {0})")]
    TangencyViolated(u32),
    #[error("truncation too low: need order {needed}, have {have}")]
    TruncationTooLow { needed: u32, have: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuiseuxError {
    #[error("zero series has no branches")]
    ZeroInput,
    #[error("series does not vanish at the origin")]
    NotAtOrigin,
    #[error("branch is identically zero")]
    ZeroBranch,
    #[error("branch lies inside the support")]
    InsideSupport,
    #[error("inconclusive within truncation order {0}")]
    Inconclusive(u32),
    #[error("operation needs an exact real branch")]
    NotExact,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TanspaceError {
    #[error("truncation shortfall: need degree {needed}, have {have}")]
    TruncationShortfall { needed: u32, have: u32 },
    #[error("codimension not stable up to degree {0}")]
    Unstable(u32),
    #[error("map germ is not in prenormal presentation")]
    NotPrenormal,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("inconclusive at jet order {0}")]
    Inconclusive(u32),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
    #[error("unknown class name `{0}`")]
    UnknownClass(String),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DeformError {
    #[error("class {0} has no finite miniversal deformation")]
    NoFiniteSpec(String),
    #[error("expected {expected} parameters, got {got}")]
    ParamCount { expected: usize, got: usize },
    #[error("deformation direction {0} is not divisible by t^2")]
    NotTangential(String),
    #[error("bad grid spec: {0}")]
    BadGrid(String),
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

/// Top-level error, mapped onto process exit codes by the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("invalid input: {0}")]
    Usage(String),
    #[error("not a tangential family: {0}")]
    Validation(GermError),
    #[error("inconclusive at jet order {0}")]
    Inconclusive(u32),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Usage(_) => 2,
            Error::Validation(_) => 3,
            Error::Inconclusive(_) => 4,
            Error::Internal(_) | Error::Io(_) => 5,
        }
    }

    /// Short machine-readable kind used in JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::Usage(_) => "UsageError",
            Error::Validation(g) => match g {
                GermError::NotAtOrigin => "NotAtOrigin",
                GermError::NotImmersedFiber => "NotImmersedFiber",
                GermError::SingularSupport => "SingularSupport",
                GermError::TangencyViolated(_) => "TangencyViolated",
                GermError::TruncationTooLow { .. } => "TruncationTooLow",
                GermError::Series(_) => "SeriesError",
            },
            Error::Inconclusive(_) => "Inconclusive",
            Error::Internal(_) => "Internal",
            Error::Io(_) => "Io",
        }
    }
}

impl From<GermError> for Error {
    fn from(e: GermError) -> Self {
        match e {
            GermError::TruncationTooLow { have, .. } => Error::Inconclusive(have),
            GermError::Series(s) => Error::Internal(s.to_string()),
            other => Error::Validation(other),
        }
    }
}

impl From<ClassifyError> for Error {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Inconclusive(n) => Error::Inconclusive(n),
            ClassifyError::UnknownClass(c) => Error::Usage(format!("unknown class `{c}`")),
            ClassifyError::Germ(g) => g.into(),
            ClassifyError::Puiseux(PuiseuxError::Inconclusive(n)) => Error::Inconclusive(n),
            other => Error::Internal(other.to_string()),
        }
    }
}

impl From<PuiseuxError> for Error {
    fn from(e: PuiseuxError) -> Self {
        match e {
            PuiseuxError::Inconclusive(n) => Error::Inconclusive(n),
            other => Error::Internal(other.to_string()),
        }
    }
}

impl From<TanspaceError> for Error {
    fn from(e: TanspaceError) -> Self {
        match e {
            TanspaceError::Unstable(n) => Error::Inconclusive(n),
            TanspaceError::TruncationShortfall { have, .. } => Error::Inconclusive(have),
            TanspaceError::NotPrenormal => Error::Usage(e.to_string()),
            TanspaceError::Series(s) => Error::Internal(s.to_string()),
        }
    }
}

impl From<DeformError> for Error {
    fn from(e: DeformError) -> Self {
        match e {
            DeformError::Germ(g) => g.into(),
            DeformError::Series(s) => Error::Internal(s.to_string()),
            other => Error::Usage(other.to_string()),
        }
    }
}

impl From<SeriesError> for Error {
    fn from(e: SeriesError) -> Self {
        Error::Internal(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvelopeError {
    #[error("resolution {0} is below the minimum of 16")]
    ResolutionTooLow(usize),
    #[error("box must have positive width and height")]
    EmptyBox,
    #[error(transparent)]
    Puiseux(#[from] PuiseuxError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

impl From<EnvelopeError> for Error {
    fn from(e: EnvelopeError) -> Self {
        match e {
            EnvelopeError::Puiseux(p) => p.into(),
            EnvelopeError::Series(s) => Error::Internal(s.to_string()),
            other => Error::Usage(other.to_string()),
        }
    }
}
