//! Unpivoted LDL' factorization of symmetric matrices.
//!
//! One factorization serves three purposes: the determinant is the product of
//! the pivots, the matrix is positive definite exactly when every pivot is
//! positive, and the inverse follows from two triangular solves. Keeping a
//! single pathway makes the regularization decisions in
//! [`crate::regularized_inverse`] reproducible and directly testable.

use nalgebra::{DMatrix, DVector};

/// LDL' factorization A = L D L' with L unit lower triangular and D diagonal.
///
/// Only the lower triangle of the input is read; the input is assumed
/// symmetric. Without pivoting the elimination can hit a zero pivot on
/// singular or indefinite input; the column where that happened is recorded
/// instead of producing non-finite values.
#[derive(Debug, Clone)]
pub struct Ldlt {
    lower: DMatrix<f64>,
    pivots: DVector<f64>,
    breakdown: Option<usize>,
}

impl Ldlt {
    pub fn factor(a: &DMatrix<f64>) -> Self {
        let p = a.nrows();
        debug_assert_eq!(p, a.ncols(), "LDL' needs a square matrix");
        let mut lower = DMatrix::identity(p, p);
        let mut pivots = DVector::zeros(p);

        for k in 0..p {
            // d_k = a_kk - sum_{j<k} l_kj^2 d_j
            let mut d = a[(k, k)];
            for j in 0..k {
                d -= lower[(k, j)] * lower[(k, j)] * pivots[j];
            }
            pivots[k] = d;
            if d == 0.0 || !d.is_finite() {
                return Self {
                    lower,
                    pivots,
                    breakdown: Some(k),
                };
            }
            for i in (k + 1)..p {
                let mut v = a[(i, k)];
                for j in 0..k {
                    v -= lower[(i, j)] * lower[(k, j)] * pivots[j];
                }
                lower[(i, k)] = v / d;
            }
        }
        Self {
            lower,
            pivots,
            breakdown: None,
        }
    }

    /// Elimination pivots d_1..d_p (partial when a breakdown occurred).
    pub fn pivots(&self) -> &DVector<f64> {
        &self.pivots
    }

    pub fn breakdown(&self) -> Option<usize> {
        self.breakdown
    }

    /// Product of the pivots. A breakdown reports 0 so that callers treat the
    /// matrix as singular rather than carrying garbage downstream.
    pub fn determinant(&self) -> f64 {
        if self.breakdown.is_some() {
            return 0.0;
        }
        self.pivots.iter().product()
    }

    /// True when the factorization completed with every pivot above `tol`.
    /// For symmetric input this is equivalent to positive definiteness.
    pub fn is_positive_definite(&self, tol: f64) -> bool {
        self.breakdown.is_none() && self.pivots.iter().all(|&d| d > tol)
    }

    /// Inverse via (L^-1)' D^-1 L^-1, symmetrized. `None` after a breakdown.
    pub fn inverse(&self) -> Option<DMatrix<f64>> {
        if self.breakdown.is_some() {
            return None;
        }
        let linv = invert_unit_lower(&self.lower);
        let p = self.pivots.len();
        let mut scaled = linv.clone();
        for i in 0..p {
            let d = self.pivots[i];
            for j in 0..=i {
                scaled[(i, j)] /= d;
            }
        }
        let inv = linv.transpose() * scaled;
        if inv.iter().any(|v| !v.is_finite()) {
            return None;
        }
        // exact symmetry for downstream quadratic forms
        Some(0.5 * (&inv + inv.transpose()))
    }

    /// Triangular square root L sqrt(D) with (L sqrt(D)) (L sqrt(D))' = A,
    /// defined only for positive definite input.
    pub fn scaled_lower(&self, tol: f64) -> Option<DMatrix<f64>> {
        if !self.is_positive_definite(tol) {
            return None;
        }
        let mut b = self.lower.clone();
        for j in 0..self.pivots.len() {
            let s = self.pivots[j].sqrt();
            for i in j..b.nrows() {
                b[(i, j)] *= s;
            }
        }
        Some(b)
    }
}

/// Forward substitution inverse of a unit lower triangular matrix.
fn invert_unit_lower(l: &DMatrix<f64>) -> DMatrix<f64> {
    let p = l.nrows();
    let mut inv = DMatrix::identity(p, p);
    for col in 0..p {
        for i in (col + 1)..p {
            let mut v = 0.0;
            for j in col..i {
                v -= l[(i, j)] * inv[(j, col)];
            }
            inv[(i, col)] = v;
        }
    }
    inv
}
