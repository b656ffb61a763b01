//! Construction of weighted composites from multivariate indicator data.
//!
//! The classical (analytic) composite applies a priori weights directly to
//! standardized indicators; its realized variance contributions drift with
//! the indicator inter-correlations. The purely analytic composite
//! premultiplies by the inverse correlation matrix so each indicator's
//! variance contribution matches its a priori target exactly, for any
//! correlation structure. This crate houses the matrix algebra for both,
//! along with standardization, correlation estimation, and regularized
//! inversion.

mod composite;
mod correlation;
mod data;
mod error;
mod factor;
mod inverse;
mod report;

pub use composite::{
    analytic_composite, analytic_correlations, purely_analytic_composite,
    purely_analytic_solution, weighted_sum_variance, CompositeKind, CompositeResult,
    PurelyAnalyticSolution, WeightSpec,
};
pub use correlation::{sample_correlation, CorrelationMatrix};
pub use data::{standardize, IndicatorMatrix, StandardizedMatrix};
pub use error::CoreError;
pub use factor::Ldlt;
pub use inverse::{regularized_inverse, Inversion, RegularizationPolicy};
pub use report::{contribution_report, contribution_rows_from_correlations, ContributionRow};
