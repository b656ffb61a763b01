use composite_core::CoreError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("equicorrelation with rho = {rho} is infeasible for p = {p}; need rho in (-1/(p-1), 1)")]
    InfeasibleRho { p: usize, rho: f64 },

    #[error("invalid population spec: {0}")]
    InvalidSpec(String),

    #[error(
        "could not reach target sd(rho) = {target_sd_rho} within {iterations} iterations \
         (best achieved {achieved})"
    )]
    TargetUnreachable {
        target_sd_rho: f64,
        achieved: f64,
        iterations: usize,
    },

    #[error("correlation matrix is not positive definite")]
    NotPositiveDefinite,

    #[error(transparent)]
    Core(#[from] CoreError),
}
