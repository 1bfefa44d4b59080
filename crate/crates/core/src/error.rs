use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid algebra shape: {0}")]
    InvalidShape(String),

    #[error("algebra is not abelian (commutator residual {residual:.3e})")]
    NotAbelian { residual: f64 },

    #[error("random sample failed to separate minimal projections after {retries} retries")]
    DegenerateSample { retries: usize },

    #[error("not a masa: algebra has dimension {algebra_dim} but its relative commutant has dimension {commutant_dim}")]
    NotMasa {
        algebra_dim: usize,
        commutant_dim: usize,
    },

    #[error("element is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },

    #[error("operator is not a projection (residual {residual:.3e})")]
    NotProjection { residual: f64 },

    #[error("resource guard: ambient dimension {required} exceeds cap {cap}")]
    ResourceLimit { required: usize, cap: usize },

    #[error("invalid lambda matrix: {0}")]
    InvalidLambda(String),

    #[error("infinite tensor rule only applies to singleton factors")]
    NonSingletonInfinite,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("restriction out of range: {0}")]
    RangeError(String),

    #[error("enumeration too large: {0}")]
    Overflow(String),

    #[error("cutdown oracle covers level {available}, level {needed} required")]
    OracleGap { needed: usize, available: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
