//! Regularized inversion of correlation matrices.

use nalgebra::DMatrix;

use crate::correlation::CorrelationMatrix;
use crate::error::CoreError;
use crate::factor::Ldlt;

/// Controls when and how a ridge is added before inverting.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizationPolicy {
    /// Determinants at or below this force one ridge application up front.
    pub det_threshold: f64,
    /// Amount added to every diagonal entry per application.
    pub ridge: f64,
    /// Give up after this many ridge applications.
    pub max_ridge_applications: u32,
    /// Max-norm bound on M * M^-1 - I, checked against the matrix actually
    /// inverted.
    pub residual_tol: f64,
    /// Pivot tolerance for the positive-definiteness certificate.
    pub pivot_tol: f64,
}

impl Default for RegularizationPolicy {
    fn default() -> Self {
        Self {
            det_threshold: 1e-5,
            ridge: 1e-6,
            max_ridge_applications: 3,
            residual_tol: 1e-8,
            pivot_tol: 1e-12,
        }
    }
}

/// Outcome of [`regularized_inverse`].
#[derive(Debug, Clone)]
pub struct Inversion {
    /// Inverse of [`Inversion::inverted`].
    pub inverse: DMatrix<f64>,
    /// The matrix actually inverted: R itself, or R plus the accumulated
    /// ridge. All downstream identities hold against this matrix.
    pub inverted: DMatrix<f64>,
    pub regularized: bool,
    pub ridge_applications: u32,
}

/// Inverts a correlation matrix, adding a small ridge to the diagonal when
/// the determinant is at or below the policy threshold.
///
/// The first ridge application mirrors the threshold rule det(R) <= 1e-5;
/// further applications (up to the policy cap) are retries for matrices that
/// remain numerically singular, i.e. fail the positive-definiteness pivot
/// check or the inversion residual bound.
pub fn regularized_inverse(
    r: &CorrelationMatrix,
    policy: &RegularizationPolicy,
) -> Result<Inversion, CoreError> {
    let mut m = r.values().clone();
    let mut applications = 0u32;

    // NaN determinants fall through to the ridge branch
    let det = Ldlt::factor(&m).determinant();
    if det.is_nan() || det <= policy.det_threshold {
        if policy.max_ridge_applications == 0 {
            return Err(CoreError::SingularAfterRegularization {
                ridge_applications: 0,
            });
        }
        add_ridge(&mut m, policy.ridge);
        applications = 1;
    }

    loop {
        let factor = Ldlt::factor(&m);
        if factor.is_positive_definite(policy.pivot_tol) {
            if let Some(inverse) = factor.inverse() {
                if residual_max_norm(&m, &inverse) < policy.residual_tol {
                    return Ok(Inversion {
                        inverse,
                        inverted: m,
                        regularized: applications > 0,
                        ridge_applications: applications,
                    });
                }
            }
        }
        if applications >= policy.max_ridge_applications {
            return Err(CoreError::SingularAfterRegularization {
                ridge_applications: applications,
            });
        }
        add_ridge(&mut m, policy.ridge);
        applications += 1;
    }
}

fn add_ridge(m: &mut DMatrix<f64>, ridge: f64) {
    for i in 0..m.nrows() {
        m[(i, i)] += ridge;
    }
}

/// max_ij |(M * Minv - I)_ij|
fn residual_max_norm(m: &DMatrix<f64>, inv: &DMatrix<f64>) -> f64 {
    let mut prod = m * inv;
    for i in 0..prod.nrows() {
        prod[(i, i)] -= 1.0;
    }
    prod.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}
