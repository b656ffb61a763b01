//! Analytic and purely analytic composite construction.
//!
//! Both composites aggregate standardized indicators z with an a priori
//! weight vector W and are rescaled to unit variance:
//!
//! * analytic:        c = z W (W'RW)^(-1/2), so the indicator-composite
//!   correlations are R W (W'RW)^(-1/2) and depend on R;
//! * purely analytic: c = z R^-1 W (W'R^-1 W)^(-1/2), so the correlations are
//!   W (W'R^-1 W)^(-1/2) and each indicator's squared correlation with the
//!   composite is proportional to W_i^2 no matter what R is.
//!
//! Squared correlations are the variance contributions; dividing them by
//! their minimum gives the relative contributions reported everywhere.

use nalgebra::DVector;

use crate::correlation::CorrelationMatrix;
use crate::data::StandardizedMatrix;
use crate::error::CoreError;
use crate::inverse::{regularized_inverse, RegularizationPolicy};

/// Strictly positive a priori weights W together with the variance
/// contributions they encode (targets_i = W_i^2).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    variance_targets: DVector<f64>,
    weights: DVector<f64>,
}

impl WeightSpec {
    /// Builds the spec from intended relative variance contributions; the
    /// weights are their square roots.
    pub fn from_variance_targets(targets: Vec<f64>) -> Result<Self, CoreError> {
        validate_positive(&targets)?;
        let variance_targets = DVector::from_vec(targets);
        let weights = variance_targets.map(f64::sqrt);
        Ok(Self {
            variance_targets,
            weights,
        })
    }

    /// Builds the spec from raw weights; the encoded variance targets are
    /// their squares.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self, CoreError> {
        validate_positive(&weights)?;
        let weights = DVector::from_vec(weights);
        let variance_targets = weights.map(|w| w * w);
        Ok(Self {
            variance_targets,
            weights,
        })
    }

    /// Unit weights for p indicators.
    pub fn unit(p: usize) -> Self {
        Self {
            variance_targets: DVector::repeat(p, 1.0),
            weights: DVector::repeat(p, 1.0),
        }
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn variance_targets(&self) -> &DVector<f64> {
        &self.variance_targets
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.len() == 0
    }

    /// Targets divided by their minimum, the scale used in reports.
    pub fn relative_targets(&self) -> DVector<f64> {
        relative_to_min(&self.variance_targets)
    }
}

fn validate_positive(values: &[f64]) -> Result<(), CoreError> {
    if values.len() < 2 {
        return Err(CoreError::InvalidWeightSpec(format!(
            "need at least 2 entries, got {}",
            values.len()
        )));
    }
    for (i, v) in values.iter().enumerate() {
        if !v.is_finite() || *v <= 0.0 {
            return Err(CoreError::InvalidWeightSpec(format!(
                "entry {i} is {v}; all entries must be finite and > 0"
            )));
        }
    }
    Ok(())
}

pub(crate) fn relative_to_min(values: &DVector<f64>) -> DVector<f64> {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    values.map(|v| v / min)
}

/// Which construction produced a [`CompositeResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompositeKind {
    Analytic,
    PurelyAnalytic,
}

impl CompositeKind {
    pub fn label(&self) -> &'static str {
        match self {
            CompositeKind::Analytic => "Analytic comp.",
            CompositeKind::PurelyAnalytic => "Purely analytic comp.",
        }
    }
}

/// Composite scores plus the per-indicator diagnostics derived from them.
#[derive(Debug, Clone)]
pub struct CompositeResult {
    kind: CompositeKind,
    scores: DVector<f64>,
    indicator_correlations: DVector<f64>,
    variance_contributions: DVector<f64>,
    relative_contributions: DVector<f64>,
    regularized: bool,
}

impl CompositeResult {
    fn build(
        kind: CompositeKind,
        scores: DVector<f64>,
        indicator_correlations: DVector<f64>,
        regularized: bool,
    ) -> Self {
        let variance_contributions = indicator_correlations.map(|c| c * c);
        let relative_contributions = relative_to_min(&variance_contributions);
        Self {
            kind,
            scores,
            indicator_correlations,
            variance_contributions,
            relative_contributions,
            regularized,
        }
    }

    pub fn kind(&self) -> CompositeKind {
        self.kind
    }

    /// Composite score per case, on the standardized scale.
    pub fn scores(&self) -> &DVector<f64> {
        &self.scores
    }

    /// Correlation of each indicator with the composite.
    pub fn indicator_correlations(&self) -> &DVector<f64> {
        &self.indicator_correlations
    }

    /// Squared indicator correlations.
    pub fn variance_contributions(&self) -> &DVector<f64> {
        &self.variance_contributions
    }

    /// Variance contributions divided by their minimum.
    pub fn relative_contributions(&self) -> &DVector<f64> {
        &self.relative_contributions
    }

    /// Whether a ridge was applied to R on the way to this result.
    pub fn regularized(&self) -> bool {
        self.regularized
    }
}

/// Var(sum_i w_i x_i) = w' S w for a covariance matrix S.
pub fn weighted_sum_variance(
    weights: &DVector<f64>,
    covariance: &nalgebra::DMatrix<f64>,
) -> Result<f64, CoreError> {
    let p = weights.len();
    if covariance.nrows() != p || covariance.ncols() != p {
        return Err(CoreError::DimensionMismatch {
            expected: p,
            actual: covariance.nrows().max(covariance.ncols()),
        });
    }
    Ok((weights.transpose() * covariance * weights)[(0, 0)])
}

/// Population-level indicator-composite correlations of the analytic
/// composite: R W (W'RW)^(-1/2).
pub fn analytic_correlations(
    r: &CorrelationMatrix,
    spec: &WeightSpec,
) -> Result<DVector<f64>, CoreError> {
    check_order(r, spec)?;
    let w = spec.weights();
    let variance = (w.transpose() * r.values() * w)[(0, 0)];
    if variance <= 1e-12 {
        return Err(CoreError::DegenerateVariance);
    }
    let scale = variance.sqrt().recip();
    Ok(r.values() * w * scale)
}

/// The purely analytic construction solved at the population level.
#[derive(Debug, Clone)]
pub struct PurelyAnalyticSolution {
    /// Weights actually applied to the standardized indicators:
    /// R^-1 W (W'R^-1 W)^(-1/2).
    pub effective_weights: DVector<f64>,
    /// Indicator-composite correlations W (W'R^-1 W)^(-1/2); proportional to
    /// W by construction.
    pub indicator_correlations: DVector<f64>,
    pub regularized: bool,
    pub ridge_applications: u32,
}

/// Solves the purely analytic construction for a correlation matrix: inverts
/// R under the policy and rescales to unit composite variance.
pub fn purely_analytic_solution(
    r: &CorrelationMatrix,
    spec: &WeightSpec,
    policy: &RegularizationPolicy,
) -> Result<PurelyAnalyticSolution, CoreError> {
    check_order(r, spec)?;
    let inversion = regularized_inverse(r, policy)?;
    let w = spec.weights();
    let rinv_w = &inversion.inverse * w;
    let variance = w.dot(&rinv_w);
    if variance <= 1e-12 {
        return Err(CoreError::DegenerateVariance);
    }
    let scale = variance.sqrt().recip();
    Ok(PurelyAnalyticSolution {
        effective_weights: rinv_w * scale,
        indicator_correlations: w * scale,
        regularized: inversion.regularized,
        ridge_applications: inversion.ridge_applications,
    })
}

/// Composite formed by weighting the standardized indicators directly,
/// rescaled to unit variance. Indicator correlations follow R W (W'RW)^(-1/2)
/// and inherit the distortions of R.
pub fn analytic_composite(
    z: &StandardizedMatrix,
    r: &CorrelationMatrix,
    spec: &WeightSpec,
) -> Result<CompositeResult, CoreError> {
    check_data(z, r)?;
    let correlations = analytic_correlations(r, spec)?;
    let variance = (spec.weights().transpose() * r.values() * spec.weights())[(0, 0)];
    let scores = z.values() * spec.weights() * variance.sqrt().recip();
    Ok(CompositeResult::build(
        CompositeKind::Analytic,
        scores,
        correlations,
        r.regularized(),
    ))
}

/// Composite whose variance contributions match the targets in `spec`
/// exactly, regardless of R: the indicators are premultiplied by R^-1 before
/// weighting.
pub fn purely_analytic_composite(
    z: &StandardizedMatrix,
    r: &CorrelationMatrix,
    spec: &WeightSpec,
    policy: &RegularizationPolicy,
) -> Result<CompositeResult, CoreError> {
    check_data(z, r)?;
    let solution = purely_analytic_solution(r, spec, policy)?;
    let scores = z.values() * &solution.effective_weights;
    Ok(CompositeResult::build(
        CompositeKind::PurelyAnalytic,
        scores,
        solution.indicator_correlations,
        solution.regularized || r.regularized(),
    ))
}

fn check_order(r: &CorrelationMatrix, spec: &WeightSpec) -> Result<(), CoreError> {
    if spec.len() != r.order() {
        return Err(CoreError::DimensionMismatch {
            expected: r.order(),
            actual: spec.len(),
        });
    }
    Ok(())
}

fn check_data(z: &StandardizedMatrix, r: &CorrelationMatrix) -> Result<(), CoreError> {
    if z.indicators() != r.order() {
        return Err(CoreError::DimensionMismatch {
            expected: r.order(),
            actual: z.indicators(),
        });
    }
    Ok(())
}
