use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid composition: {0}")]
    InvalidComposition(String),

    #[error("offset {offset} out of range for family {family} (block size {size})")]
    OffsetOutOfRange {
        family: usize,
        offset: usize,
        size: usize,
    },

    #[error("family label {family} outside 1..={families}")]
    FamilyOutOfRange { family: usize, families: usize },

    #[error("invalid problem setup: {0}")]
    InvalidSetup(String),

    #[error("{0}")]
    Domain(String),

    /// The exact backend cannot represent the requested quantity.
    #[error("value is not exactly representable: {0}")]
    NotExact(String),

    #[error("integral does not exist: {0}")]
    NonIntegrable(String),

    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tolerance:e} with {nodes} nodes")]
    QuadratureFailed {
        estimate: f64,
        tolerance: f64,
        nodes: usize,
    },

    /// Gauss-Borel elimination met a vanishing (or sub-floor) pivot at the given 0-based step.
    #[error("SingularMinor({0}): leading principal minor of size {size} vanishes", size = .0 + 1)]
    SingularMinor(usize),

    #[error("triangular matrix has a zero diagonal entry at {0}")]
    ZeroDiagonal(usize),

    #[error("singular linear system: {0}")]
    SingularSystem(String),

    #[error("type I normalization impossible: {0}")]
    NormalizationImpossible(String),

    #[error("truncation window too small: {0}")]
    WindowTooSmall(String),

    #[error("index ({row}, {col}) lies outside the band of J")]
    OutsideBand { row: usize, col: usize },

    #[error("evaluation point {0} lies inside the support interval")]
    PointInSupport(String),

    #[error("series tail bound {bound:e} not below tolerance {tolerance:e}")]
    TailBoundNotAchieved { bound: f64, tolerance: f64 },

    #[error("coincident points: x = y")]
    CoincidentPoints,
}

pub type Result<T> = std::result::Result<T, Error>;
