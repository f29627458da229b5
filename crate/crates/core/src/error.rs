use thiserror::Error;

/// Engine errors. Vertex numbers carried by variants are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("vertex {0} is not a mutable vertex")]
    KOutOfRange(usize),
    #[error("vertex {0} lies on a 2-cycle")]
    TwoCycleAtK(usize),
    #[error("vertex {0} carries a loop")]
    LoopAtK(usize),
    #[error("2-cycle between vertices {0} and {1} cannot be split off")]
    NonSplittable2Cycle(usize, usize),
    #[error("quiver with potential is not gentle: {0}")]
    NotGentle(String),
    #[error("column identity violated: {0}")]
    IdentityViolated(String),
    #[error("exchange produced a non-Laurent expression")]
    NonLaurentResult,
    #[error("kernel cone condition fails, so the relation is not a partial order")]
    NotAPartialOrder,
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
    #[error("search bound must be positive")]
    BoundZero,
    #[error("truncation order {p} too small for total dimension {dim}")]
    TruncationTooSmall { p: usize, dim: usize },
    #[error("invalid representation: {0}")]
    InvalidRep(String),
    #[error("point counts are not polynomial in q: {0}")]
    NonPolynomialCount(String),
    #[error("input too large: {0}")]
    TooLarge(String),
    #[error("method not applicable: {0}")]
    NotApplicable(String),
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("arc {0} cannot be flipped")]
    NotFlippable(String),
    #[error("no built-in base triangulation for this surface")]
    BaseTriangulationRequired,
    #[error("rank mismatch: expected {expected}, got {actual}")]
    RankMismatch { expected: usize, actual: usize },
    #[error("assignment does not cover variable {0}")]
    IncompleteAssignment(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::KOutOfRange(_) => "KOutOfRange",
            Error::TwoCycleAtK(_) => "TwoCycleAtK",
            Error::LoopAtK(_) => "LoopAtK",
            Error::NonSplittable2Cycle(..) => "NonSplittable2Cycle",
            Error::NotGentle(_) => "NotGentle",
            Error::IdentityViolated(_) => "IdentityViolated",
            Error::NonLaurentResult => "NonLaurentResult",
            Error::NotAPartialOrder => "NotAPartialOrder",
            Error::NotSquare => "NotSquare",
            Error::NotSkewSymmetric => "NotSkewSymmetric",
            Error::BoundZero => "BoundZero",
            Error::TruncationTooSmall { .. } => "TruncationTooSmall",
            Error::InvalidRep(_) => "InvalidRep",
            Error::NonPolynomialCount(_) => "NonPolynomialCount",
            Error::TooLarge(_) => "TooLarge",
            Error::NotApplicable(_) => "NotApplicable",
            Error::InvalidTriangulation(_) => "InvalidTriangulation",
            Error::NotFlippable(_) => "NotFlippable",
            Error::BaseTriangulationRequired => "BaseTriangulationRequired",
            Error::RankMismatch { .. } => "RankMismatch",
            Error::IncompleteAssignment(_) => "IncompleteAssignment",
            Error::Precondition(_) => "Precondition",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
