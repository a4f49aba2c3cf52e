use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid fields: {0}")]
    InvalidFields(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("tensor of {requested} entries exceeds the size cap of {cap}")]
    SizeCap { requested: u128, cap: u128 },
    #[error("query point lies outside the convex hull of the samples")]
    OutsideHull,
    #[error("fields are not jointly {order}-monotone (defect {defect:e})")]
    NotMonotone { order: usize, defect: f64 },
    #[error("fixed-point iteration did not converge in {iterations} steps (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("non-uniform weights are not supported here: {0}")]
    NonUniformWeights(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
