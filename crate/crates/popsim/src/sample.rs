//! Seeded multivariate normal sampling for empirical cross-checks.

use composite_core::{CorrelationMatrix, IndicatorMatrix, Ldlt};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::SimError;

/// Draws n cases from a zero-mean multivariate normal with covariance R,
/// through the triangular square root of R. Bit-identical output for a fixed
/// seed.
pub fn mvn_sample(r: &CorrelationMatrix, n: usize, seed: u64) -> Result<IndicatorMatrix, SimError> {
    let factor = Ldlt::factor(r.values());
    let b = factor
        .scaled_lower(1e-12)
        .ok_or(SimError::NotPositiveDefinite)?;
    let p = r.order();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut g = DMatrix::<f64>::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            g[(i, j)] = rng.sample::<f64, _>(StandardNormal);
        }
    }
    Ok(IndicatorMatrix::new(g * b.transpose())?)
}
