//! The six-population comparison sweep.
//!
//! Population-level only: indicator-composite correlations are computed from
//! the generated R by formula, with no sampling. Monte Carlo cross-checks go
//! through [`crate::mvn_sample`] separately.

use std::io::{self, Write};

use composite_core::{
    analytic_correlations, contribution_rows_from_correlations, purely_analytic_solution,
    ContributionRow, CorrelationMatrix, RegularizationPolicy, WeightSpec,
};

use crate::error::SimError;
use crate::generate::{make_heterogeneous_r, off_diagonal_sd, PopulationSpec, GENERATOR_ID};

pub const DEFAULT_P: usize = 5;
pub const DEFAULT_MEAN_RHO: f64 = 0.3;
pub const DEFAULT_SD_START: f64 = 0.01;
pub const DEFAULT_SD_END: f64 = 0.23;
pub const DEFAULT_POPULATIONS: usize = 6;
pub const DEFAULT_SEED: u64 = 7;

/// Composite construction, as written into sweep tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Analytic,
    PurelyAnalytic,
}

impl SweepKind {
    pub fn label(&self) -> &'static str {
        match self {
            SweepKind::Analytic => "analytic",
            SweepKind::PurelyAnalytic => "purely_analytic",
        }
    }
}

/// Which weight vector a sweep cell used.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightPattern {
    Unit,
    Weighted,
}

impl WeightPattern {
    pub fn label(&self) -> &'static str {
        match self {
            WeightPattern::Unit => "unit",
            WeightPattern::Weighted => "weighted",
        }
    }
}

/// One kind x pattern block of per-indicator diagnostics for a population.
#[derive(Debug, Clone)]
pub struct SweepCell {
    pub kind: SweepKind,
    pub pattern: WeightPattern,
    pub rows: Vec<ContributionRow>,
    pub regularized: bool,
}

impl SweepCell {
    /// max - min of the indicator-composite correlations.
    pub fn correlation_spread(&self) -> f64 {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for row in &self.rows {
            min = min.min(row.correlation);
            max = max.max(row.correlation);
        }
        max - min
    }
}

/// Everything recorded about one generated population.
#[derive(Debug, Clone)]
pub struct PopulationRecord {
    /// 1-based position in the grid.
    pub index: usize,
    pub target_sd_rho: f64,
    pub achieved_sd_rho: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub correlation: CorrelationMatrix,
    pub cells: Vec<SweepCell>,
}

impl PopulationRecord {
    pub fn cell(&self, kind: SweepKind, pattern: WeightPattern) -> &SweepCell {
        self.cells
            .iter()
            .find(|c| c.kind == kind && c.pattern == pattern)
            .expect("every kind x pattern cell is populated")
    }
}

#[derive(Debug, Clone)]
pub struct SweepMetadata {
    pub seed: u64,
    pub mean_rho: f64,
    pub p: usize,
    pub generator: &'static str,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub populations: Vec<PopulationRecord>,
}

/// One line of the flattened sweep table.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub population_index: usize,
    pub target_sd_rho: f64,
    pub achieved_sd_rho: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub kind: SweepKind,
    pub weight_pattern: WeightPattern,
    pub indicator_index: usize,
    pub correlation: f64,
    pub contribution: f64,
    pub relative_contribution: f64,
}

pub const SWEEP_COLUMNS: &str = "population_index,target_sd_rho,achieved_sd_rho,min_rho,max_rho,kind,weight_pattern,indicator_index,correlation,contribution,relative_contribution";

impl SweepResult {
    /// Flattens to one row per population x kind x pattern x indicator.
    pub fn rows(&self) -> Vec<SweepRow> {
        let mut out = Vec::new();
        for pop in &self.populations {
            for cell in &pop.cells {
                for row in &cell.rows {
                    out.push(SweepRow {
                        population_index: pop.index,
                        target_sd_rho: pop.target_sd_rho,
                        achieved_sd_rho: pop.achieved_sd_rho,
                        min_rho: pop.min_rho,
                        max_rho: pop.max_rho,
                        kind: cell.kind,
                        weight_pattern: cell.pattern,
                        indicator_index: row.indicator,
                        correlation: row.correlation,
                        contribution: row.contribution,
                        relative_contribution: row.relative_contribution,
                    });
                }
            }
        }
        out
    }

    /// Plot-ready delimited table with `#` metadata lines and a header row.
    pub fn write_delimited<W: Write>(&self, out: &mut W, delimiter: char) -> io::Result<()> {
        writeln!(out, "# seed={}", self.metadata.seed)?;
        writeln!(out, "# mean_rho={}", self.metadata.mean_rho)?;
        writeln!(out, "# generator={}", self.metadata.generator)?;
        writeln!(out, "# p={}", self.metadata.p)?;
        let any_regularized = self
            .populations
            .iter()
            .flat_map(|pop| pop.cells.iter())
            .any(|c| c.regularized);
        writeln!(out, "# regularized={any_regularized}")?;
        writeln!(
            out,
            "{}",
            SWEEP_COLUMNS.replace(',', &delimiter.to_string())
        )?;
        for row in self.rows() {
            let fields = [
                row.population_index.to_string(),
                row.target_sd_rho.to_string(),
                row.achieved_sd_rho.to_string(),
                row.min_rho.to_string(),
                row.max_rho.to_string(),
                row.kind.label().to_string(),
                row.weight_pattern.label().to_string(),
                row.indicator_index.to_string(),
                row.correlation.to_string(),
                row.contribution.to_string(),
                row.relative_contribution.to_string(),
            ];
            writeln!(out, "{}", fields.join(&delimiter.to_string()))?;
        }
        Ok(())
    }
}

/// Evenly spaced target sd(rho) grid sharing one base seed; population i gets
/// seed + i.
pub fn grid(
    p: usize,
    mean_rho: f64,
    sd_start: f64,
    sd_end: f64,
    populations: usize,
    seed: u64,
) -> Result<Vec<PopulationSpec>, SimError> {
    if populations == 0 {
        return Err(SimError::InvalidSpec("need at least one population".into()));
    }
    (0..populations)
        .map(|i| {
            let t = if populations == 1 {
                sd_start
            } else {
                sd_start + (sd_end - sd_start) * i as f64 / (populations - 1) as f64
            };
            PopulationSpec::new(p, mean_rho, t, seed.wrapping_add(i as u64))
        })
        .collect()
}

/// The shipped six-population grid: p = 5, mean 0.3, sd(rho) from 0.01 to
/// 0.23. Start and end match the reference populations; the intermediate
/// values and the mean level are defaults, not recovered quantities.
pub fn default_grid(seed: u64) -> Vec<PopulationSpec> {
    grid(
        DEFAULT_P,
        DEFAULT_MEAN_RHO,
        DEFAULT_SD_START,
        DEFAULT_SD_END,
        DEFAULT_POPULATIONS,
        seed,
    )
    .expect("default grid parameters are valid")
}

/// Generates every population in the grid and evaluates both composite kinds
/// under both weight patterns, purely at the population level.
pub fn run_sweep(
    grid: &[PopulationSpec],
    spec_weights: &WeightSpec,
    unit_weights: &WeightSpec,
) -> Result<SweepResult, SimError> {
    let first = grid
        .first()
        .ok_or_else(|| SimError::InvalidSpec("empty population grid".into()))?;
    let p = first.p;
    for spec in grid {
        if spec.p != p {
            return Err(SimError::InvalidSpec(format!(
                "population grid mixes p = {p} and p = {}",
                spec.p
            )));
        }
    }
    for (name, weights) in [("spec", spec_weights), ("unit", unit_weights)] {
        if weights.len() != p {
            return Err(SimError::InvalidSpec(format!(
                "{name} weight pattern has {} entries for p = {p}",
                weights.len()
            )));
        }
    }

    let policy = RegularizationPolicy::default();
    let mut populations = Vec::with_capacity(grid.len());
    for (i, spec) in grid.iter().enumerate() {
        let r = make_heterogeneous_r(spec)?;
        let offs = r.off_diagonals();
        let achieved = off_diagonal_sd(&offs);
        let min_rho = offs.iter().copied().fold(f64::INFINITY, f64::min);
        let max_rho = offs.iter().copied().fold(f64::NEG_INFINITY, f64::max);

        let mut cells = Vec::with_capacity(4);
        for (pattern, weights) in [
            (WeightPattern::Unit, unit_weights),
            (WeightPattern::Weighted, spec_weights),
        ] {
            let analytic = analytic_correlations(&r, weights)?;
            cells.push(SweepCell {
                kind: SweepKind::Analytic,
                pattern,
                rows: contribution_rows_from_correlations(&analytic),
                regularized: false,
            });
            let purely = purely_analytic_solution(&r, weights, &policy)?;
            cells.push(SweepCell {
                kind: SweepKind::PurelyAnalytic,
                pattern,
                rows: contribution_rows_from_correlations(&purely.indicator_correlations),
                regularized: purely.regularized,
            });
        }
        populations.push(PopulationRecord {
            index: i + 1,
            target_sd_rho: spec.target_sd_rho,
            achieved_sd_rho: achieved,
            min_rho,
            max_rho,
            correlation: r,
            cells,
        });
    }

    Ok(SweepResult {
        metadata: SweepMetadata {
            seed: first.seed,
            mean_rho: first.mean_rho,
            p,
            generator: GENERATOR_ID,
        },
        populations,
    })
}

/// The weighted pattern used in the shipped comparison: unit weight on all
/// indicators except the last two, which get weight 2 (so their variance
/// contributions should come out four times larger).
pub fn default_weighted_pattern(p: usize) -> WeightSpec {
    let mut w = vec![1.0; p];
    for v in w.iter_mut().skip(p.saturating_sub(2)) {
        *v = 2.0;
    }
    WeightSpec::from_weights(w).expect("strictly positive pattern")
}
