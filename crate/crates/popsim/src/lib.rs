//! Population correlation structures with controlled off-diagonal spread,
//! seeded multivariate normal sampling, and the six-population sweep
//! comparing analytic with purely analytic composites.

mod error;
mod generate;
mod sample;
mod sweep;

pub use error::SimError;
pub use generate::{
    make_equicorrelated, make_heterogeneous_r, off_diagonal_sd, PopulationSpec, GENERATOR_ID,
};
pub use sample::mvn_sample;
pub use sweep::{
    default_grid, default_weighted_pattern, grid, run_sweep, PopulationRecord, SweepCell,
    SweepKind, SweepMetadata, SweepResult, SweepRow, WeightPattern, DEFAULT_MEAN_RHO,
    DEFAULT_P, DEFAULT_POPULATIONS, DEFAULT_SD_END, DEFAULT_SD_START, DEFAULT_SEED,
    SWEEP_COLUMNS,
};
