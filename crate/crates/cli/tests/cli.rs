//! End-to-end checks of the binary: exit codes, file shapes, determinism,
//! golden-file parity, and the JSON round trip.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use composite_core::{
    purely_analytic_composite, sample_correlation, standardize, IndicatorMatrix,
    RegularizationPolicy, WeightSpec,
};
use nalgebra::DMatrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_composite"))
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn fixture_input() -> PathBuf {
    golden_dir().join("indicators_p=5_n=100.txt")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn read_matrix(path: &Path) -> IndicatorMatrix {
    let text = fs::read_to_string(path).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#') && !l.starts_with('"'))
        .map(|l| l.split(',').map(|f| f.trim().parse().unwrap()).collect())
        .collect();
    let n = rows.len();
    let p = rows[0].len();
    IndicatorMatrix::new(DMatrix::from_fn(n, p, |i, j| rows[i][j])).unwrap()
}

#[test]
fn fixture_has_the_referenced_layout() {
    let x = read_matrix(&fixture_input());
    assert_eq!(x.cases(), 100);
    assert_eq!(x.indicators(), 5);
}

#[test]
fn analyze_matches_the_golden_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        fixture_input().to_str().unwrap(),
        "--targets",
        "1,1,1,2,2",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    for name in [
        "purely_analytic_composites_p=5_n=100_results.txt",
        "purely_analytic_composites_p=5_n=100_indicator_intercorrelations.txt",
        "purely_analytic_composites_p=5_n=100_composite_scores.txt",
    ] {
        let got = fs::read_to_string(dir.path().join(name)).unwrap();
        let want = fs::read_to_string(golden_dir().join(name)).unwrap();
        assert_eq!(got, want, "{name} drifted from the golden copy");
    }
}

#[test]
fn analyze_is_byte_deterministic() {
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "analyze",
            "--input",
            fixture_input().to_str().unwrap(),
            "--targets",
            "1,1,1,2,2",
            "--output-dir",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        fs::read(dir.path().join("purely_analytic_composites_p=5_n=100_results.txt")).unwrap()
    };
    assert_eq!(run_once(), run_once());
}

#[test]
fn scores_file_round_trips_against_reported_correlations() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "analyze",
        "--input",
        fixture_input().to_str().unwrap(),
        "--targets",
        "1,1,1,2,2",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let scores = read_matrix(&dir.path().join("purely_analytic_composites_p=5_n=100_composite_scores.txt"));
    let x = read_matrix(&fixture_input());
    let z = standardize(&x).unwrap();
    let r = sample_correlation(&z);
    let spec = WeightSpec::from_weights(vec![1.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
    let purely =
        purely_analytic_composite(&z, &r, &spec, &RegularizationPolicy::default()).unwrap();

    // correlate the rounded purely analytic score column with each indicator
    let rounded = scores.values().column(1);
    for j in 0..5 {
        let col = z.values().column(j);
        let n = col.len() as f64;
        let cm = col.iter().sum::<f64>() / n;
        let sm = rounded.iter().sum::<f64>() / n;
        let mut cov = 0.0;
        let mut cs = 0.0;
        let mut ss = 0.0;
        for i in 0..col.len() {
            cov += (col[i] - cm) * (rounded[i] - sm);
            cs += (col[i] - cm) * (col[i] - cm);
            ss += (rounded[i] - sm) * (rounded[i] - sm);
        }
        let emp = cov / (cs * ss).sqrt();
        let reported = purely.indicator_correlations()[j];
        assert!(
            (emp - reported).abs() < 5e-4,
            "column {j}: {emp} vs {reported}"
        );
    }
}

// Full-precision JSON and rounded text come from the same in-memory values:
// rounding the JSON numbers must reproduce the text tables byte for byte.
#[test]
fn json_and_text_outputs_agree_after_rounding() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture_input();
    for json in [false, true] {
        let mut args = vec![
            "analyze",
            "--input",
            input.to_str().unwrap(),
            "--targets",
            "1,1,1,2,2",
            "--output-dir",
            dir.path().to_str().unwrap(),
        ];
        if json {
            args.push("--json");
        }
        let out = run(&args);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }

    let doc: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("purely_analytic_composites_p=5_n=100_results.json"))
            .unwrap(),
    )
    .unwrap();
    assert_eq!(doc["p"], 5);
    assert_eq!(doc["n"], 100);

    // results table rebuilt from the JSON values
    let text =
        fs::read_to_string(dir.path().join("purely_analytic_composites_p=5_n=100_results.txt"))
            .unwrap();
    let mut expected = String::new();
    for (idx, label) in [(0, "Analytic comp."), (1, "Purely analytic comp.")] {
        let c = &doc["composites"][idx];
        for j in 0..5 {
            expected.push_str(&format!(
                "\"{label}\",{:.3},{:.3},{:.3}\n",
                c["indicator_correlations"][j].as_f64().unwrap(),
                c["variance_contributions"][j].as_f64().unwrap(),
                c["relative_contributions"][j].as_f64().unwrap(),
            ));
        }
    }
    let body: String = text
        .lines()
        .filter(|l| l.starts_with('"'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(body, expected);

    // score file rebuilt the same way
    let scores_text = fs::read_to_string(
        dir.path()
            .join("purely_analytic_composites_p=5_n=100_composite_scores.txt"),
    )
    .unwrap();
    let mut expected_scores = String::new();
    for i in 0..100 {
        expected_scores.push_str(&format!(
            "{:.4},{:.4}\n",
            doc["composites"][0]["scores"][i].as_f64().unwrap(),
            doc["composites"][1]["scores"][i].as_f64().unwrap(),
        ));
    }
    let score_body: String = scores_text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('"'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(score_body, expected_scores);

    // and the JSON stays numerically consistent with an in-process rebuild
    let x = read_matrix(&fixture_input());
    let z = standardize(&x).unwrap();
    let r = sample_correlation(&z);
    let spec = WeightSpec::from_weights(vec![1.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
    let purely =
        purely_analytic_composite(&z, &r, &spec, &RegularizationPolicy::default()).unwrap();
    for j in 0..5 {
        let got = doc["composites"][1]["indicator_correlations"][j]
            .as_f64()
            .unwrap();
        assert!((got - purely.indicator_correlations()[j]).abs() < 1e-12);
    }
}

#[test]
fn simulate_emits_the_expected_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "simulate",
        "--p",
        "5",
        "--grid",
        "0.01:0.23:6",
        "--seed",
        "7",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("sweep_p=5_populations=6.txt")).unwrap();
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("population_index"))
        .count();
    // 6 populations x 2 kinds x 2 weight patterns x 5 indicators
    assert_eq!(data_rows, 120);
}

#[test]
fn riskbudget_reports_in_sample_identity() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "riskbudget",
        "--input",
        fixture_input().to_str().unwrap(),
        "--targets",
        "1,1,1,2,2",
        "--labels",
        "a,b,c,d,e",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.path().join("risk_budget_p=5_window=100.txt")).unwrap();
    let gap_line = text
        .lines()
        .find(|l| l.starts_with("# max_abs_relative_gap_in_sample="))
        .unwrap();
    let gap: f64 = gap_line.rsplit('=').next().unwrap().parse().unwrap();
    assert!(gap < 1e-8, "in-sample gap {gap}");
}

#[test]
fn usage_errors_exit_two_and_data_errors_exit_one() {
    // no input flag at all
    let out = bin().arg("analyze").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // weight count mismatch
    let out = run(&[
        "analyze",
        "--input",
        fixture_input().to_str().unwrap(),
        "--targets",
        "1,2",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "single-line error: {stderr}");
    assert!(stderr.starts_with("error: usage:"));

    // ragged data
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "1,2\n3\n").unwrap();
    let out = run(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.starts_with("error: data:"));
    assert!(stderr.contains("line 2"));
}

// Regenerates tests/golden/. Run manually after intentional format changes:
//   cargo test -p composite-cli --test cli regenerate_golden_fixtures -- --ignored
#[test]
#[ignore]
fn regenerate_golden_fixtures() {
    use composite_sim::{make_heterogeneous_r, mvn_sample, PopulationSpec};

    let spec = PopulationSpec::new(5, 0.3, 0.15, 2024).unwrap();
    let r = make_heterogeneous_r(&spec).unwrap();
    let x = mvn_sample(&r, 100, 4242).unwrap();

    let mut body = String::new();
    for i in 0..x.cases() {
        let row: Vec<String> = (0..x.indicators())
            .map(|j| x.values()[(i, j)].to_string())
            .collect();
        body.push_str(&row.join(","));
        body.push('\n');
    }
    fs::create_dir_all(golden_dir()).unwrap();
    fs::write(fixture_input(), body).unwrap();

    let out = run(&[
        "analyze",
        "--input",
        fixture_input().to_str().unwrap(),
        "--targets",
        "1,1,1,2,2",
        "--output-dir",
        golden_dir().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}


// With exactly uncorrelated columns R is the identity and the two composite
// kinds coincide, so their report rows must be identical.
#[test]
fn identity_case_reports_identical_rows_for_both_kinds() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("orthogonal.txt");
    // columns (1,-1,1,-1) and (1,1,-1,-1) are exactly orthogonal
    fs::write(&input, "1,1\n-1,1\n1,-1\n-1,-1\n").unwrap();
    let out = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let results =
        fs::read_to_string(dir.path().join("purely_analytic_composites_p=2_n=4_results.txt"))
            .unwrap();
    let numbers: Vec<&str> = results
        .lines()
        .filter(|l| l.starts_with('"'))
        .map(|l| l.split_once(',').unwrap().1)
        .collect();
    assert_eq!(numbers.len(), 4);
    assert_eq!(numbers[0], numbers[2], "indicator 1 rows differ across kinds");
    assert_eq!(numbers[1], numbers[3], "indicator 2 rows differ across kinds");

    let scores =
        fs::read_to_string(dir.path().join("purely_analytic_composites_p=2_n=4_composite_scores.txt"))
            .unwrap();
    for line in scores.lines().filter(|l| !l.starts_with('#') && !l.starts_with('"')) {
        let (a, b) = line.split_once(',').unwrap();
        assert_eq!(a, b, "score columns differ in the identity case");
    }
}
