//! Acceptance suite: every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line.
//!
//! Run with:
//!   cargo test -p composite-cli --test acceptance -- --nocapture

use std::fs;
use std::panic::{catch_unwind, resume_unwind, UnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use composite_budget::{evaluate_budget, RiskBudgetSpec};
use composite_core::{
    analytic_correlations, purely_analytic_solution, sample_correlation, standardize,
    weighted_sum_variance, CorrelationMatrix, IndicatorMatrix, RegularizationPolicy, WeightSpec,
};
use composite_sim::{
    default_grid, default_weighted_pattern, mvn_sample, run_sweep, PopulationSpec, SweepKind,
    SweepResult, WeightPattern, DEFAULT_SEED,
};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

fn criterion(number: u32, name: &str, limit: Option<Duration>, body: impl FnOnce() + UnwindSafe) {
    let start = Instant::now();
    let result = catch_unwind(body);
    let elapsed = start.elapsed();
    let within = limit.is_none_or(|l| elapsed <= l);
    let status = if result.is_ok() && within { "PASS" } else { "FAIL" };
    println!("criterion {number} ({name}): {status} [{elapsed:.2?}]");
    if let Err(e) = result {
        resume_unwind(e);
    }
    assert!(
        within,
        "criterion {number} took {elapsed:?}, limit {limit:?}"
    );
}

/// Random positive-definite correlation matrix via a Gram construction.
fn random_correlation(p: usize, rng: &mut ChaCha12Rng) -> CorrelationMatrix {
    let g = DMatrix::from_fn(p, 2 * p, |_, _| rng.random_range(-1.0f64..1.0));
    let s = &g * g.transpose();
    let mut r = s.clone();
    for i in 0..p {
        for j in 0..p {
            r[(i, j)] = s[(i, j)] / (s[(i, i)] * s[(j, j)]).sqrt();
        }
    }
    CorrelationMatrix::new(r).expect("gram matrices are valid correlation matrices")
}

/// The shared sample behind criteria 1 and 6: 500 matrices with p cycling
/// through 2..=10, each with random positive targets.
fn criterion_one_sample() -> Vec<(CorrelationMatrix, WeightSpec)> {
    let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_5501);
    (0..500)
        .map(|k| {
            let p = 2 + (k % 9);
            let r = random_correlation(p, &mut rng);
            let targets: Vec<f64> = (0..p).map(|_| rng.random_range(0.1f64..10.0)).collect();
            let spec = WeightSpec::from_variance_targets(targets).unwrap();
            (r, spec)
        })
        .collect()
}

fn random_dataset(n: usize, p: usize, rng: &mut ChaCha12Rng) -> IndicatorMatrix {
    IndicatorMatrix::new(DMatrix::from_fn(n, p, |_, _| rng.random_range(-5.0f64..5.0))).unwrap()
}

fn default_sweep() -> SweepResult {
    run_sweep(
        &default_grid(DEFAULT_SEED),
        &default_weighted_pattern(5),
        &WeightSpec::unit(5),
    )
    .unwrap()
}

#[test]
fn criterion_1_exact_proportionality() {
    criterion(
        1,
        "exact proportionality on 500 random structures",
        Some(Duration::from_secs(10)),
        || {
            let policy = RegularizationPolicy::default();
            for (i, (r, spec)) in criterion_one_sample().iter().enumerate() {
                let solution = purely_analytic_solution(r, spec, &policy).unwrap();
                let contributions: Vec<f64> = solution
                    .indicator_correlations
                    .iter()
                    .map(|c| c * c)
                    .collect();
                let min = contributions.iter().cloned().fold(f64::INFINITY, f64::min);
                let target_relative = spec.relative_targets();
                for (j, c) in contributions.iter().enumerate() {
                    let got = c / min;
                    let want = target_relative[j];
                    assert!(
                        (got - want).abs() < 1e-8,
                        "draw {i}, indicator {j}: relative {got} vs target {want}"
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_2_unit_weight_correlation_spreads() {
    criterion(
        2,
        "purely analytic spread vanishes, analytic spread grows 5x",
        Some(Duration::from_secs(5)),
        || {
            let sweep = default_sweep();
            assert_eq!(sweep.populations.len(), 6);
            for pop in &sweep.populations {
                let spread = pop
                    .cell(SweepKind::PurelyAnalytic, WeightPattern::Unit)
                    .correlation_spread();
                assert!(
                    spread.abs() < 1e-10,
                    "population {}: purely analytic spread {spread}",
                    pop.index
                );
            }
            let first = sweep.populations.first().unwrap();
            let last = sweep.populations.last().unwrap();
            assert!((first.achieved_sd_rho - 0.01).abs() < 1e-3);
            assert!((last.achieved_sd_rho - 0.23).abs() < 1e-3);
            let low = first
                .cell(SweepKind::Analytic, WeightPattern::Unit)
                .correlation_spread();
            let high = last
                .cell(SweepKind::Analytic, WeightPattern::Unit)
                .correlation_spread();
            assert!(
                high >= 5.0 * low,
                "analytic spread {high} at sd 0.23 vs {low} at sd 0.01"
            );
        },
    );
}

#[test]
fn criterion_3_differential_weight_contributions() {
    criterion(
        3,
        "weights (1,1,1,2,2) give 4:1 contributions only when purely analytic",
        Some(Duration::from_secs(5)),
        || {
            let sweep = default_sweep();
            let expected = [1.0, 1.0, 1.0, 4.0, 4.0];
            for pop in &sweep.populations {
                let cell = pop.cell(SweepKind::PurelyAnalytic, WeightPattern::Weighted);
                for (row, want) in cell.rows.iter().zip(expected.iter()) {
                    assert!(
                        (row.relative_contribution - want).abs() < 1e-8,
                        "population {}: purely analytic relative {} vs {want}",
                        pop.index,
                        row.relative_contribution
                    );
                }
            }
            let last = sweep.populations.last().unwrap();
            let max_dev = last
                .cell(SweepKind::Analytic, WeightPattern::Weighted)
                .rows
                .iter()
                .zip(expected.iter())
                .map(|(row, want)| (row.relative_contribution - want).abs())
                .fold(0.0f64, f64::max);
            assert!(
                max_dev > 0.05,
                "analytic contributions too close to target at the highest spread: {max_dev}"
            );
        },
    );
}

#[test]
fn criterion_4_equal_correlations_under_unit_weights() {
    criterion(
        4,
        "unit weights equalize purely analytic correlations on 200 random R",
        None,
        || {
            let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_5504);
            let policy = RegularizationPolicy::default();
            for k in 0..200 {
                let p = 2 + (k % 9);
                let r = random_correlation(p, &mut rng);
                let solution =
                    purely_analytic_solution(&r, &WeightSpec::unit(p), &policy).unwrap();
                for pair in solution.indicator_correlations.as_slice().windows(2) {
                    assert!(
                        (pair[0] - pair[1]).abs() < 1e-12,
                        "draw {k}: correlations differ: {pair:?}"
                    );
                }
            }
        },
    );
}

#[test]
fn criterion_5_weighted_sum_variance_consistency() {
    criterion(
        5,
        "w'Rw equals empirical variance; unit case equals p plus correlation sum",
        None,
        || {
            let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_5505);
            for k in 0..100 {
                let n = rng.random_range(20usize..80);
                let p = rng.random_range(2usize..=6);
                let z = standardize(&random_dataset(n, p, &mut rng)).unwrap();
                let r = sample_correlation(&z);

                let w = DVector::from_fn(p, |_, _| rng.random_range(0.1f64..5.0));
                let algebraic = weighted_sum_variance(&w, r.values()).unwrap();
                let combo = z.values() * &w;
                let mean = combo.mean();
                let empirical =
                    combo.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / z.divisor();
                assert!(
                    (algebraic - empirical).abs() < 1e-10,
                    "draw {k}: {algebraic} vs {empirical}"
                );

                let unit = DVector::repeat(p, 1.0);
                let v = weighted_sum_variance(&unit, r.values()).unwrap();
                let off_sum: f64 = 2.0 * r.off_diagonals().iter().sum::<f64>();
                assert!(
                    (v - (p as f64 + off_sum)).abs() < 1e-10,
                    "draw {k}: {v} vs {}",
                    p as f64 + off_sum
                );
            }
        },
    );
}

#[test]
fn criterion_6_correlation_bound() {
    criterion(
        6,
        "purely analytic correlations never exceed 1",
        None,
        || {
            let policy = RegularizationPolicy::default();
            for (i, (r, spec)) in criterion_one_sample().iter().enumerate() {
                let solution = purely_analytic_solution(r, spec, &policy).unwrap();
                for c in solution.indicator_correlations.iter() {
                    assert!(c.abs() <= 1.0 + 1e-10, "draw {i}: correlation {c}");
                }
            }
        },
    );
}

#[test]
fn criterion_7_report_format_parity() {
    criterion(
        7,
        "analyze output matches the reference report format",
        None,
        || {
            let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
            let dir = tempfile::tempdir().unwrap();
            let input = golden.join("indicators_p=5_n=100.txt");
            let out = std::process::Command::new(env!("CARGO_BIN_EXE_composite"))
                .args([
                    "analyze",
                    "--input",
                    input.to_str().unwrap(),
                    "--targets",
                    "1,1,1,2,2",
                    "--output-dir",
                    dir.path().to_str().unwrap(),
                ])
                .output()
                .unwrap();
            assert!(out.status.success());

            let results_name = "purely_analytic_composites_p=5_n=100_results.txt";
            let results = fs::read_to_string(dir.path().join(results_name)).unwrap();

            // column semantics and 3-decimal rounding
            let header = results
                .lines()
                .find(|l| !l.starts_with('#'))
                .expect("header row");
            assert_eq!(header, "Composite,cor-with-comp,var-within-comp,relative-var");
            let three_decimals = |s: &str| s.split('.').next_back().unwrap().len() == 3;
            let mut rows = 0;
            for line in results.lines().filter(|l| l.starts_with('"')) {
                rows += 1;
                let fields: Vec<&str> = line.split(',').collect();
                assert_eq!(fields.len(), 4);
                for f in &fields[1..] {
                    assert!(three_decimals(f), "field {f} is not 3-decimal");
                }
            }
            assert_eq!(rows, 10, "one row per composite kind x indicator");

            // relative var = var / min(var), checked per kind block from the
            // rounded table itself
            for kind in ["\"Analytic comp.\"", "\"Purely analytic comp.\""] {
                let block: Vec<Vec<f64>> = results
                    .lines()
                    .filter(|l| l.starts_with(kind))
                    .map(|l| {
                        l.split(',')
                            .skip(1)
                            .map(|f| f.parse().unwrap())
                            .collect()
                    })
                    .collect();
                assert_eq!(block.len(), 5);
                let min_var = block.iter().map(|r| r[1]).fold(f64::INFINITY, f64::min);
                for row in &block {
                    // both columns were rounded independently at full
                    // precision; propagating the half-ulp of 3-decimal
                    // rounding through the ratio gives this row's bound
                    let tol = 5.01e-4 * (1.0 + (1.0 + row[2]) / min_var);
                    assert!(
                        (row[2] - row[1] / min_var).abs() < tol,
                        "{kind}: relative {} vs var/min {}",
                        row[2],
                        row[1] / min_var
                    );
                }
            }

            // score-file header names and 4-decimal scores
            let scores_name = "purely_analytic_composites_p=5_n=100_composite_scores.txt";
            let scores = fs::read_to_string(dir.path().join(scores_name)).unwrap();
            let header = scores
                .lines()
                .find(|l| !l.starts_with('#'))
                .expect("score header");
            assert_eq!(header, "\"Analytic comp.\",\"Purely analytic comp.\"");
            let four_decimals = |s: &str| s.split('.').next_back().unwrap().len() == 4;
            for line in scores.lines().filter(|l| !l.starts_with('#') && !l.starts_with('"')) {
                for f in line.split(',') {
                    assert!(four_decimals(f), "score {f} is not 4-decimal");
                }
            }

            // byte parity with the golden copies
            for name in [
                results_name,
                "purely_analytic_composites_p=5_n=100_indicator_intercorrelations.txt",
                scores_name,
            ] {
                let got = fs::read_to_string(dir.path().join(name)).unwrap();
                let want = fs::read_to_string(golden.join(name)).unwrap();
                assert_eq!(got, want, "{name} drifted from the golden copy");
            }
        },
    );
}

#[test]
fn criterion_8_monte_carlo_closure() {
    criterion(
        8,
        "sample contributions at n = 100000 track population contributions",
        Some(Duration::from_secs(60)),
        || {
            let policy = RegularizationPolicy::default();
            let spec = default_weighted_pattern(5);
            for k in 0..20u64 {
                let target_sd = 0.01 + 0.22 * (k as f64) / 19.0;
                let pop = PopulationSpec::new(5, 0.3, target_sd, 500 + k).unwrap();
                let r = composite_sim::make_heterogeneous_r(&pop).unwrap();
                let population = purely_analytic_solution(&r, &spec, &policy).unwrap();

                let data = mvn_sample(&r, 100_000, 9000 + k).unwrap();
                let estimated = sample_correlation(&standardize(&data).unwrap());
                let sampled = purely_analytic_solution(&estimated, &spec, &policy).unwrap();

                for (a, b) in population
                    .indicator_correlations
                    .iter()
                    .zip(sampled.indicator_correlations.iter())
                {
                    let gap = (a * a - b * b).abs();
                    assert!(gap < 0.005, "population {k}: contribution gap {gap}");
                }
            }
        },
    );
}

#[test]
fn criterion_9_in_sample_budget_identity() {
    criterion(
        9,
        "in-sample realized budget equals targets on 100 random inputs",
        None,
        || {
            let mut rng = ChaCha12Rng::seed_from_u64(0xACCE_5509);
            for k in 0..100 {
                let n = rng.random_range(40usize..140);
                let p = rng.random_range(2usize..=6);
                let returns = random_dataset(n, p, &mut rng);
                let targets: Vec<f64> = (0..p).map(|_| rng.random_range(0.2f64..8.0)).collect();
                let labels: Vec<String> = (1..=p).map(|i| format!("asset{i}")).collect();
                let spec = RiskBudgetSpec::new(labels, targets, n).unwrap();
                let report = evaluate_budget(&returns, &spec, None).unwrap();
                assert!(
                    report.in_sample.max_abs_relative_gap < 1e-8,
                    "draw {k}: gap {}",
                    report.in_sample.max_abs_relative_gap
                );
            }
        },
    );
}

#[test]
fn analytic_distortion_grows_with_the_correlation_spread() {
    // cross-check behind criteria 2 and 3: the analytic composite's miss
    // against the 4:1 target widens from the lowest to the highest sd(rho),
    // while the purely analytic miss stays at numerical zero
    let sweep = default_sweep();
    let expected = [1.0, 1.0, 1.0, 4.0, 4.0];
    let max_dev = |pop: &composite_sim::PopulationRecord, kind: SweepKind| {
        pop.cell(kind, WeightPattern::Weighted)
            .rows
            .iter()
            .zip(expected.iter())
            .map(|(row, want)| (row.relative_contribution - want).abs())
            .fold(0.0f64, f64::max)
    };
    let first = sweep.populations.first().unwrap();
    let last = sweep.populations.last().unwrap();
    assert!(max_dev(last, SweepKind::Analytic) > max_dev(first, SweepKind::Analytic));
    assert!(max_dev(last, SweepKind::PurelyAnalytic) < 1e-8);

    let corr = analytic_correlations(&first.correlation, &default_weighted_pattern(5)).unwrap();
    assert!(corr.iter().all(|c| c.is_finite()));
}
