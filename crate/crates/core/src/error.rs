use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid jump measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("insufficient support: depth {requested} requested but the measure has {atoms} atoms")]
    InsufficientSupport { requested: usize, atoms: usize },

    #[error("measure degenerate at depth {depth}")]
    DegenerateMeasure { depth: usize },

    #[error("recurrence table too shallow: need depth {needed}, have {depth}")]
    TableTooShallow { needed: usize, depth: usize },

    #[error("polynomial index {index} exceeds table depth {depth}")]
    IndexBeyondDepth { index: usize, depth: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("oracle scale exceeded: basis of {basis} monomials exceeds limit {limit}")]
    OracleScaleExceeded { basis: usize, limit: usize },

    #[error("oracle Gram matrix ill-conditioned (condition estimate {condition:.3e})")]
    IllConditioned { condition: f64 },

    #[error("truncation too shallow for exact moment: order {order} needs depth >= {order}, have {depth}")]
    TruncationTooShallow { order: usize, depth: usize },

    #[error("insufficient depth to detect pattern: depth {depth} < 3")]
    InsufficientDepth { depth: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
