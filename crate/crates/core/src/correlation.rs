//! Correlation matrices and their estimation from standardized data.

use nalgebra::DMatrix;

use crate::data::StandardizedMatrix;
use crate::error::CoreError;

/// A p x p correlation matrix: symmetric, unit diagonal, off-diagonals in
/// [-1, 1]. The `regularized` flag records whether a ridge was added to the
/// diagonal somewhere upstream (see [`crate::regularized_inverse`]).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    values: DMatrix<f64>,
    regularized: bool,
}

impl CorrelationMatrix {
    /// Validates and canonicalizes a candidate matrix. Symmetry and the unit
    /// diagonal must hold within 1e-12 and off-diagonals must lie in [-1, 1]
    /// up to the same slack; the stored matrix is made exactly symmetric with
    /// an exact unit diagonal.
    pub fn new(values: DMatrix<f64>) -> Result<Self, CoreError> {
        let p = values.nrows();
        if p != values.ncols() {
            return Err(CoreError::InvalidCorrelation(format!(
                "matrix is {}x{}, not square",
                values.nrows(),
                values.ncols()
            )));
        }
        if p < 2 {
            return Err(CoreError::TooSmall { rows: p, cols: p });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::NonFiniteInput);
        }
        for i in 0..p {
            if (values[(i, i)] - 1.0).abs() > 1e-12 {
                return Err(CoreError::InvalidCorrelation(format!(
                    "diagonal entry ({i},{i}) is {}, expected 1",
                    values[(i, i)]
                )));
            }
            for j in (i + 1)..p {
                if (values[(i, j)] - values[(j, i)]).abs() > 1e-12 {
                    return Err(CoreError::InvalidCorrelation(format!(
                        "asymmetric at ({i},{j}): {} vs {}",
                        values[(i, j)],
                        values[(j, i)]
                    )));
                }
                if values[(i, j)].abs() > 1.0 + 1e-12 {
                    return Err(CoreError::InvalidCorrelation(format!(
                        "entry ({i},{j}) = {} lies outside [-1, 1]",
                        values[(i, j)]
                    )));
                }
            }
        }
        Ok(Self {
            values: canonicalize(values),
            regularized: false,
        })
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Matrix order p.
    pub fn order(&self) -> usize {
        self.values.nrows()
    }

    pub fn regularized(&self) -> bool {
        self.regularized
    }

    pub fn with_regularized_flag(mut self, regularized: bool) -> Self {
        self.regularized = regularized;
        self
    }

    /// The p(p-1)/2 distinct off-diagonal correlations (upper triangle,
    /// row-major order).
    pub fn off_diagonals(&self) -> Vec<f64> {
        let p = self.order();
        let mut out = Vec::with_capacity(p * (p - 1) / 2);
        for i in 0..p {
            for j in (i + 1)..p {
                out.push(self.values[(i, j)]);
            }
        }
        out
    }
}

/// Forces exact symmetry, an exact unit diagonal, and off-diagonals clamped
/// into [-1, 1].
fn canonicalize(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let p = m.nrows();
    for i in 0..p {
        m[(i, i)] = 1.0;
        for j in (i + 1)..p {
            let v = (0.5 * (m[(i, j)] + m[(j, i)])).clamp(-1.0, 1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

/// Sample correlation R = Z'Z / (n-1) of standardized data.
///
/// The result is exactly symmetric with an exact unit diagonal; floating-point
/// residue beyond Cauchy-Schwarz is clamped away.
pub fn sample_correlation(z: &StandardizedMatrix) -> CorrelationMatrix {
    let r = z.values().transpose() * z.values() / z.divisor();
    CorrelationMatrix {
        values: canonicalize(r),
        regularized: false,
    }
}
