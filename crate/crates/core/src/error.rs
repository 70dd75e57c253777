use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {len} entries for dimension {n}")]
    NotSquare { n: usize, len: usize },
    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension {n} exceeds the configured cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("root finder did not converge after {iterations} iterations")]
    RootFindingFailure { iterations: usize },
    #[error("simplex exceeded its pivot budget of {pivots}")]
    LpNumericalFailure { pivots: usize },
    #[error("affine scale factor must be nonzero")]
    DegenerateScale,
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("no table entry matches pattern {pattern}")]
    TableMiss { pattern: String },
    #[error("pattern {pattern} does not match template {template} of entry {entry}")]
    TemplateMismatch {
        entry: String,
        template: String,
        pattern: String,
    },
    #[error("recipe {entry} produced a non-positive entry: {detail}")]
    RecipeViolation { entry: String, detail: String },
    #[error("table data: {0}")]
    Table(String),
}
