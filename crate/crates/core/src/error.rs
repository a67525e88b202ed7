use thiserror::Error;

use crate::design::ModelSet;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Predictor is constant (practical mode) or all zero (formal mode).
    #[error("predictor {} has zero norm after centering", .0 + 1)]
    ZeroNormColumn(usize),

    #[error("model {0} is rank deficient")]
    RankDeficient(ModelSet),

    #[error("model {0} fits the response exactly; t statistics are undefined")]
    DegenerateResidual(ModelSet),

    #[error(
        "model of size {size} leaves no residual degrees of freedom (effective n = {n_effective})"
    )]
    TooManyPredictors { size: usize, n_effective: usize },

    #[error("screened set has {size} predictors but effective n is {n_effective}")]
    ScreenTooLarge { size: usize, n_effective: usize },

    #[error("lasso did not converge after {iterations} sweeps (kkt gap {kkt_gap:.3e})")]
    NotConverged { iterations: usize, kkt_gap: f64 },

    #[error("enumeration of {count} subsets exceeds the limit of {limit}")]
    EnumerationTooLarge { count: u128, limit: u128 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("restricted eigenvalue estimate is not positive")]
    KappaDegenerate,

    #[error("invalid scenario: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
