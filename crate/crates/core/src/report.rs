//! Per-indicator contribution tables.

use crate::composite::CompositeResult;

/// One indicator's diagnostics: correlation with the composite, its square,
/// and the square divided by the smallest square.
#[derive(Debug, Clone, PartialEq)]
pub struct ContributionRow {
    /// 1-based indicator index, in original column order.
    pub indicator: usize,
    pub correlation: f64,
    pub contribution: f64,
    pub relative_contribution: f64,
}

/// Flattens a composite result into report rows, one per indicator.
pub fn contribution_report(result: &CompositeResult) -> Vec<ContributionRow> {
    rows(
        result.indicator_correlations(),
        result.variance_contributions(),
        result.relative_contributions(),
    )
}

/// Builds report rows straight from an indicator-correlation vector, for
/// population-level work where no scores exist.
pub fn contribution_rows_from_correlations(
    correlations: &nalgebra::DVector<f64>,
) -> Vec<ContributionRow> {
    let contributions = correlations.map(|c| c * c);
    let relatives = crate::composite::relative_to_min(&contributions);
    rows(correlations, &contributions, &relatives)
}

fn rows(
    correlations: &nalgebra::DVector<f64>,
    contributions: &nalgebra::DVector<f64>,
    relatives: &nalgebra::DVector<f64>,
) -> Vec<ContributionRow> {
    correlations
        .iter()
        .zip(contributions.iter())
        .zip(relatives.iter())
        .enumerate()
        .map(|(i, ((&correlation, &contribution), &relative))| ContributionRow {
            indicator: i + 1,
            correlation,
            contribution,
            relative_contribution: relative,
        })
        .collect()
}
