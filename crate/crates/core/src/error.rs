use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value must not be NaN")]
    NotANumber,
    #[error("expected a value in [0, 1], got {0}")]
    UnitRange(f64),
    #[error("expected a nonpositive value, got {0}")]
    PositiveValue(f64),
    #[error("truncation depth must be a positive integer")]
    ZeroDepth,
    #[error("spaces do not match")]
    SpaceMismatch,
    #[error("point space must be nonempty with pairwise distinct labels")]
    BadSpace,
    #[error("unknown point {0:?}")]
    UnknownPoint(String),
    #[error("all weights are at the bottom element")]
    AllBottom,
    #[error("weights are not normalized (unit shortfall {0:.3e})")]
    NotNormalized(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("length mismatch: {left} atoms vs {right} weights")]
    LengthMismatch { left: usize, right: usize },
    #[error("flavor mismatch")]
    FlavorMismatch,
    #[error("a polytope needs at least one generator")]
    EmptyGenerators,
    #[error("function value {0} outside [0, 1]")]
    FunctionRange(f64),
    #[error("map must be defined on every point of the source space")]
    PartialMap,
    #[error("point lies outside the source domain")]
    OutsideDomain,
    #[error("atom {0} lies outside the embedding domain")]
    AtomOutsideDomain(usize),
    #[error("candidate map is not injective on the sample grid")]
    NotInjective,
    #[error(
        "certification grid too coarse at resolution {resolution:.3e}: {undecided} undecided cells"
    )]
    GridTooCoarse { resolution: f64, undecided: usize },
    #[error("invalid probe configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid map expression: {0}")]
    InvalidExpression(String),
}

pub type Result<T> = std::result::Result<T, Error>;
