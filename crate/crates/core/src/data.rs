//! Raw indicator observations and their standardized form.
//!
//! All sample moments in this crate use the n-1 divisor, so a standardized
//! column has mean 0 and sample variance exactly 1.

use nalgebra::DMatrix;

use crate::error::CoreError;

/// An n x p table of indicator readings: rows are cases, columns are indicators.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorMatrix {
    values: DMatrix<f64>,
}

impl IndicatorMatrix {
    /// Wraps a raw observation matrix, rejecting non-finite entries and
    /// tables smaller than 2x2.
    pub fn new(values: DMatrix<f64>) -> Result<Self, CoreError> {
        if values.nrows() < 2 || values.ncols() < 2 {
            return Err(CoreError::TooSmall {
                rows: values.nrows(),
                cols: values.ncols(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFiniteInput);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Number of cases (rows).
    pub fn cases(&self) -> usize {
        self.values.nrows()
    }

    /// Number of indicators (columns).
    pub fn indicators(&self) -> usize {
        self.values.ncols()
    }
}

/// Column-wise standardized data: each column has mean 0 and unit sample
/// variance under the n-1 divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizedMatrix {
    values: DMatrix<f64>,
}

impl StandardizedMatrix {
    /// Validates an externally produced matrix against the standardization
    /// invariants (column means 0 and variances 1, both within 1e-12).
    pub fn new(values: DMatrix<f64>) -> Result<Self, CoreError> {
        if values.nrows() < 2 || values.ncols() < 2 {
            return Err(CoreError::TooSmall {
                rows: values.nrows(),
                cols: values.ncols(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFiniteInput);
        }
        let divisor = (values.nrows() - 1) as f64;
        for j in 0..values.ncols() {
            let col = values.column(j);
            let mean = col.mean();
            let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / divisor;
            if mean.abs() > 1e-12 || (var - 1.0).abs() > 1e-12 {
                return Err(CoreError::InvalidCorrelation(format!(
                    "column {j} is not standardized (mean {mean:e}, variance {var})"
                )));
            }
        }
        Ok(Self { values })
    }

    pub(crate) fn from_standardized(values: DMatrix<f64>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn cases(&self) -> usize {
        self.values.nrows()
    }

    pub fn indicators(&self) -> usize {
        self.values.ncols()
    }

    /// The variance divisor, n-1.
    pub fn divisor(&self) -> f64 {
        (self.cases() - 1) as f64
    }
}

/// Centers and scales every column to mean 0 and unit sample variance (n-1
/// divisor). Column order is preserved.
pub fn standardize(x: &IndicatorMatrix) -> Result<StandardizedMatrix, CoreError> {
    let n = x.cases();
    let divisor = (n - 1) as f64;
    let mut z = x.values().clone();
    for j in 0..x.indicators() {
        let col = z.column(j);
        let mean = col.mean();
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / divisor;
        if var <= 0.0 {
            return Err(CoreError::ZeroVarianceColumn(j));
        }
        let sd = var.sqrt();
        for i in 0..n {
            z[(i, j)] = (z[(i, j)] - mean) / sd;
        }
    }
    Ok(StandardizedMatrix::from_standardized(z))
}
