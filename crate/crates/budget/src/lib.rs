//! Risk budgeting by target variance contribution.
//!
//! Assets are standardized, their correlation matrix is estimated on an
//! estimation window, and the effective weights R^-1 W (W'R^-1 W)^(-1/2) are
//! applied so that each asset's squared correlation with the portfolio
//! composite matches its a priori contribution target. In-sample this is an
//! algebraic identity; on a holdout window the report only quantifies the
//! gap, it never asserts attainment.

use std::io::{self, Write};

use composite_core::{
    purely_analytic_solution, sample_correlation, standardize, CoreError, CorrelationMatrix,
    IndicatorMatrix, RegularizationPolicy, StandardizedMatrix, WeightSpec,
};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BudgetError {
    #[error("invalid risk budget spec: {0}")]
    InvalidSpec(String),

    #[error("window of {available} case(s) is too short; need at least {required}")]
    WindowTooShort { required: usize, available: usize },

    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Labels, desired variance contributions, and the estimation window length.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskBudgetSpec {
    asset_labels: Vec<String>,
    weights: WeightSpec,
    estimation_window: usize,
}

impl RiskBudgetSpec {
    /// `variance_targets` are desired variance contributions; the applied
    /// weights are their square roots. Labels must be unique and nonempty,
    /// and the estimation window must hold at least p + 1 cases.
    pub fn new(
        asset_labels: Vec<String>,
        variance_targets: Vec<f64>,
        estimation_window: usize,
    ) -> Result<Self, BudgetError> {
        let p = asset_labels.len();
        if variance_targets.len() != p {
            return Err(BudgetError::InvalidSpec(format!(
                "{p} labels but {} variance targets",
                variance_targets.len()
            )));
        }
        for (i, label) in asset_labels.iter().enumerate() {
            if label.trim().is_empty() {
                return Err(BudgetError::InvalidSpec(format!("label {i} is empty")));
            }
            if asset_labels[..i].contains(label) {
                return Err(BudgetError::InvalidSpec(format!(
                    "duplicate label {label:?}"
                )));
            }
        }
        let weights = WeightSpec::from_variance_targets(variance_targets)
            .map_err(|e| BudgetError::InvalidSpec(e.to_string()))?;
        if estimation_window < p + 1 {
            return Err(BudgetError::WindowTooShort {
                required: p + 1,
                available: estimation_window,
            });
        }
        Ok(Self {
            asset_labels,
            weights,
            estimation_window,
        })
    }

    pub fn asset_labels(&self) -> &[String] {
        &self.asset_labels
    }

    pub fn weights(&self) -> &WeightSpec {
        &self.weights
    }

    pub fn estimation_window(&self) -> usize {
        self.estimation_window
    }

    pub fn assets(&self) -> usize {
        self.asset_labels.len()
    }
}

/// Realized diagnostics on one window of data.
#[derive(Debug, Clone)]
pub struct WindowReport {
    pub cases: usize,
    /// Empirical correlation of each standardized asset with the composite.
    pub realized_correlations: DVector<f64>,
    /// Squared realized correlations.
    pub realized_contributions: DVector<f64>,
    /// Realized contributions divided by their minimum.
    pub realized_relative: DVector<f64>,
    /// max_i |realized_relative_i - target_relative_i|
    pub max_abs_relative_gap: f64,
}

/// Effective weights plus realized-versus-target diagnostics, in-sample and
/// optionally on a holdout window.
#[derive(Debug, Clone)]
pub struct BudgetReport {
    pub asset_labels: Vec<String>,
    /// R^-1 W (W'R^-1 W)^(-1/2), estimated on the estimation window and
    /// applied to standardized series.
    pub effective_weights: DVector<f64>,
    pub target_relative: DVector<f64>,
    pub regularized: bool,
    pub estimation_window: usize,
    pub in_sample: WindowReport,
    pub holdout: Option<WindowReport>,
}

impl BudgetReport {
    /// Delimited table with `#` metadata lines; one row per window x asset,
    /// full precision.
    pub fn write_delimited<W: Write>(&self, out: &mut W, delimiter: char) -> io::Result<()> {
        let d = delimiter.to_string();
        writeln!(out, "# estimation_window={}", self.estimation_window)?;
        writeln!(
            out,
            "# holdout_cases={}",
            self.holdout.as_ref().map(|h| h.cases).unwrap_or(0)
        )?;
        writeln!(out, "# regularized={}", self.regularized)?;
        writeln!(
            out,
            "# max_abs_relative_gap_in_sample={}",
            self.in_sample.max_abs_relative_gap
        )?;
        if let Some(h) = &self.holdout {
            writeln!(out, "# max_abs_relative_gap_holdout={}", h.max_abs_relative_gap)?;
        }
        writeln!(
            out,
            "{}",
            [
                "window",
                "label",
                "effective_weight",
                "realized_correlation",
                "realized_contribution",
                "target_relative",
                "realized_relative",
            ]
            .join(&d)
        )?;
        let mut emit = |name: &str, window: &WindowReport| -> io::Result<()> {
            for i in 0..self.asset_labels.len() {
                writeln!(
                    out,
                    "{}",
                    [
                        name.to_string(),
                        self.asset_labels[i].clone(),
                        self.effective_weights[i].to_string(),
                        window.realized_correlations[i].to_string(),
                        window.realized_contributions[i].to_string(),
                        self.target_relative[i].to_string(),
                        window.realized_relative[i].to_string(),
                    ]
                    .join(&d)
                )?;
            }
            Ok(())
        };
        emit("in_sample", &self.in_sample)?;
        if let Some(h) = &self.holdout {
            emit("holdout", h)?;
        }
        Ok(())
    }
}

/// Weights applied to standardized series so the composite has unit variance
/// under R and contribution ratios equal to the target ratios:
/// R^-1 W (W'R^-1 W)^(-1/2).
pub fn effective_weights(
    r: &CorrelationMatrix,
    spec: &WeightSpec,
    policy: &RegularizationPolicy,
) -> Result<DVector<f64>, CoreError> {
    Ok(purely_analytic_solution(r, spec, policy)?.effective_weights)
}

/// Estimates R on the first `estimation_window` cases of `returns`, derives
/// the effective weights there, and reports realized contributions in-sample
/// and, when given, on the holdout window under those same weights.
pub fn evaluate_budget(
    returns: &IndicatorMatrix,
    spec: &RiskBudgetSpec,
    holdout: Option<&IndicatorMatrix>,
) -> Result<BudgetReport, BudgetError> {
    let p = spec.assets();
    if returns.indicators() != p {
        return Err(BudgetError::InvalidSpec(format!(
            "returns have {} columns for {p} assets",
            returns.indicators()
        )));
    }
    if returns.cases() < spec.estimation_window() {
        return Err(BudgetError::WindowTooShort {
            required: spec.estimation_window(),
            available: returns.cases(),
        });
    }
    if let Some(h) = holdout {
        if h.indicators() != p {
            return Err(BudgetError::InvalidSpec(format!(
                "holdout has {} columns for {p} assets",
                h.indicators()
            )));
        }
    }

    let estimation = IndicatorMatrix::new(
        returns
            .values()
            .rows(0, spec.estimation_window())
            .into_owned(),
    )?;
    let z = standardize(&estimation)?;
    let r = sample_correlation(&z);
    let solution = purely_analytic_solution(&r, spec.weights(), &RegularizationPolicy::default())?;
    let target_relative = spec.weights().relative_targets();

    let in_sample = window_report(&z, &solution.effective_weights, &target_relative);
    let holdout = match holdout {
        Some(h) => {
            let hz = standardize(h)?;
            Some(window_report(
                &hz,
                &solution.effective_weights,
                &target_relative,
            ))
        }
        None => None,
    };

    Ok(BudgetReport {
        asset_labels: spec.asset_labels().to_vec(),
        effective_weights: solution.effective_weights,
        target_relative,
        regularized: solution.regularized,
        estimation_window: spec.estimation_window(),
        in_sample,
        holdout,
    })
}

/// Realized correlations of each standardized column with the composite the
/// weights produce on this window, computed empirically.
fn window_report(
    z: &StandardizedMatrix,
    weights: &DVector<f64>,
    target_relative: &DVector<f64>,
) -> WindowReport {
    let scores = z.values() * weights;
    let realized_correlations = column_score_correlations(z.values(), &scores);
    let realized_contributions = realized_correlations.map(|c| c * c);
    let min = realized_contributions
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let realized_relative = realized_contributions.map(|c| c / min);
    let max_abs_relative_gap = realized_relative
        .iter()
        .zip(target_relative.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    WindowReport {
        cases: z.cases(),
        realized_correlations,
        realized_contributions,
        realized_relative,
        max_abs_relative_gap,
    }
}

fn column_score_correlations(z: &DMatrix<f64>, scores: &DVector<f64>) -> DVector<f64> {
    let n = z.nrows();
    let score_mean = scores.mean();
    let score_ss: f64 = scores.iter().map(|s| (s - score_mean) * (s - score_mean)).sum();
    DVector::from_fn(z.ncols(), |j, _| {
        let col = z.column(j);
        let col_mean = col.mean();
        let mut cov = 0.0;
        let mut col_ss = 0.0;
        for i in 0..n {
            let dc = col[i] - col_mean;
            cov += dc * (scores[i] - score_mean);
            col_ss += dc * dc;
        }
        cov / (col_ss * score_ss).sqrt()
    })
}
