//! Report emission: the three analyze files, sweep tables, budget reports,
//! and their JSON equivalents.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use composite_budget::BudgetReport;
use composite_core::{contribution_report, CompositeResult, CorrelationMatrix, WeightSpec};
use composite_sim::SweepResult;
use serde::Serialize;

pub const TOOL_NAME: &str = "composite";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Formatting knobs shared by the text writers.
#[derive(Debug, Clone)]
pub struct OutputConfig {
    pub output_dir: PathBuf,
    pub delimiter: char,
    /// Decimals in report tables and the correlation matrix.
    pub table_decimals: usize,
    /// Decimals in score files.
    pub score_decimals: usize,
    pub json: bool,
}

#[derive(Debug)]
pub struct IoFailure {
    pub path: PathBuf,
    pub source: io::Error,
}

impl std::fmt::Display for IoFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path.display(), self.source)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), IoFailure> {
    fs::write(path, contents).map_err(|source| IoFailure {
        path: path.to_path_buf(),
        source,
    })
}

fn metadata_lines(p: usize, n: usize, regularized: bool) -> String {
    format!(
        "# tool={TOOL_NAME} {TOOL_VERSION}\n# p={p} n={n}\n# regularized={regularized}\n"
    )
}

/// Writes the three analyze outputs (results table, indicator
/// inter-correlations, composite scores) and returns their paths. In JSON
/// mode a single full-precision file replaces them.
pub fn write_reports(
    analytic: &CompositeResult,
    purely: &CompositeResult,
    r: &CorrelationMatrix,
    spec: &WeightSpec,
    n: usize,
    config: &OutputConfig,
) -> Result<Vec<PathBuf>, IoFailure> {
    let p = r.order();
    let stem = format!("purely_analytic_composites_p={p}_n={n}");
    let regularized = analytic.regularized() || purely.regularized();

    if config.json {
        let path = config.output_dir.join(format!("{stem}_results.json"));
        let doc = AnalyzeDocument::new(analytic, purely, r, spec, n, regularized);
        let body = serde_json::to_string_pretty(&doc).expect("serializable document");
        write_file(&path, &body)?;
        return Ok(vec![path]);
    }

    let d = config.delimiter;
    let dec = config.table_decimals;

    // 1. results table: one row per composite kind x indicator
    let mut results = metadata_lines(p, n, regularized);
    results.push_str(&format!(
        "Composite{d}cor-with-comp{d}var-within-comp{d}relative-var\n"
    ));
    for result in [analytic, purely] {
        for row in contribution_report(result) {
            results.push_str(&format!(
                "\"{}\"{d}{:.dec$}{d}{:.dec$}{d}{:.dec$}\n",
                result.kind().label(),
                row.correlation,
                row.contribution,
                row.relative_contribution,
            ));
        }
    }
    let results_path = config.output_dir.join(format!("{stem}_results.txt"));
    write_file(&results_path, &results)?;

    // 2. indicator inter-correlations
    let mut cor = metadata_lines(p, n, regularized);
    for i in 0..p {
        let row: Vec<String> = (0..p)
            .map(|j| format!("{:.dec$}", r.values()[(i, j)]))
            .collect();
        cor.push_str(&row.join(&d.to_string()));
        cor.push('\n');
    }
    let cor_path = config
        .output_dir
        .join(format!("{stem}_indicator_intercorrelations.txt"));
    write_file(&cor_path, &cor)?;

    // 3. composite scores
    let sdec = config.score_decimals;
    let mut scores = metadata_lines(p, n, regularized);
    scores.push_str(&format!("\"Analytic comp.\"{d}\"Purely analytic comp.\"\n"));
    for i in 0..n {
        scores.push_str(&format!(
            "{:.sdec$}{d}{:.sdec$}\n",
            analytic.scores()[i],
            purely.scores()[i],
        ));
    }
    let scores_path = config.output_dir.join(format!("{stem}_composite_scores.txt"));
    write_file(&scores_path, &scores)?;

    Ok(vec![results_path, cor_path, scores_path])
}

/// Writes the sweep table (text or JSON) and returns its path.
pub fn write_sweep(sweep: &SweepResult, config: &OutputConfig) -> Result<PathBuf, IoFailure> {
    let stem = format!(
        "sweep_p={}_populations={}",
        sweep.metadata.p,
        sweep.populations.len()
    );
    if config.json {
        let path = config.output_dir.join(format!("{stem}.json"));
        let doc = SweepDocument::new(sweep);
        write_file(
            &path,
            &serde_json::to_string_pretty(&doc).expect("serializable document"),
        )?;
        return Ok(path);
    }
    let path = config.output_dir.join(format!("{stem}.txt"));
    let mut buf = Vec::new();
    sweep
        .write_delimited(&mut buf, config.delimiter)
        .map_err(|source| IoFailure {
            path: path.clone(),
            source,
        })?;
    write_file(&path, &String::from_utf8(buf).expect("utf8 table"))?;
    Ok(path)
}

/// Writes the budget report (text or JSON) and returns its path.
pub fn write_budget(report: &BudgetReport, config: &OutputConfig) -> Result<PathBuf, IoFailure> {
    let stem = format!(
        "risk_budget_p={}_window={}",
        report.asset_labels.len(),
        report.estimation_window
    );
    if config.json {
        let path = config.output_dir.join(format!("{stem}.json"));
        let doc = BudgetDocument::new(report);
        write_file(
            &path,
            &serde_json::to_string_pretty(&doc).expect("serializable document"),
        )?;
        return Ok(path);
    }
    let path = config.output_dir.join(format!("{stem}.txt"));
    let mut buf = Vec::new();
    report
        .write_delimited(&mut buf, config.delimiter)
        .map_err(|source| IoFailure {
            path: path.clone(),
            source,
        })?;
    write_file(&path, &String::from_utf8(buf).expect("utf8 table"))?;
    Ok(path)
}

// ---------------------------------------------------------------------------
// JSON documents (full precision)

#[derive(Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

impl ToolInfo {
    fn current() -> Self {
        Self {
            name: TOOL_NAME,
            version: TOOL_VERSION,
        }
    }
}

#[derive(Serialize)]
struct CompositeDocument {
    kind: String,
    scores: Vec<f64>,
    indicator_correlations: Vec<f64>,
    variance_contributions: Vec<f64>,
    relative_contributions: Vec<f64>,
}

impl CompositeDocument {
    fn new(result: &CompositeResult) -> Self {
        Self {
            kind: match result.kind() {
                composite_core::CompositeKind::Analytic => "analytic".into(),
                composite_core::CompositeKind::PurelyAnalytic => "purely_analytic".into(),
            },
            scores: result.scores().iter().copied().collect(),
            indicator_correlations: result.indicator_correlations().iter().copied().collect(),
            variance_contributions: result.variance_contributions().iter().copied().collect(),
            relative_contributions: result.relative_contributions().iter().copied().collect(),
        }
    }
}

#[derive(Serialize)]
struct AnalyzeDocument {
    tool: ToolInfo,
    p: usize,
    n: usize,
    regularized: bool,
    weights: Vec<f64>,
    variance_targets: Vec<f64>,
    correlation: Vec<Vec<f64>>,
    composites: Vec<CompositeDocument>,
}

impl AnalyzeDocument {
    fn new(
        analytic: &CompositeResult,
        purely: &CompositeResult,
        r: &CorrelationMatrix,
        spec: &WeightSpec,
        n: usize,
        regularized: bool,
    ) -> Self {
        let p = r.order();
        Self {
            tool: ToolInfo::current(),
            p,
            n,
            regularized,
            weights: spec.weights().iter().copied().collect(),
            variance_targets: spec.variance_targets().iter().copied().collect(),
            correlation: (0..p)
                .map(|i| (0..p).map(|j| r.values()[(i, j)]).collect())
                .collect(),
            composites: vec![CompositeDocument::new(analytic), CompositeDocument::new(purely)],
        }
    }
}

#[derive(Serialize)]
struct SweepRowDocument {
    population_index: usize,
    target_sd_rho: f64,
    achieved_sd_rho: f64,
    min_rho: f64,
    max_rho: f64,
    kind: &'static str,
    weight_pattern: &'static str,
    indicator_index: usize,
    correlation: f64,
    contribution: f64,
    relative_contribution: f64,
}

#[derive(Serialize)]
struct SweepDocument {
    tool: ToolInfo,
    seed: u64,
    mean_rho: f64,
    p: usize,
    generator: &'static str,
    rows: Vec<SweepRowDocument>,
}

impl SweepDocument {
    fn new(sweep: &SweepResult) -> Self {
        Self {
            tool: ToolInfo::current(),
            seed: sweep.metadata.seed,
            mean_rho: sweep.metadata.mean_rho,
            p: sweep.metadata.p,
            generator: sweep.metadata.generator,
            rows: sweep
                .rows()
                .into_iter()
                .map(|r| SweepRowDocument {
                    population_index: r.population_index,
                    target_sd_rho: r.target_sd_rho,
                    achieved_sd_rho: r.achieved_sd_rho,
                    min_rho: r.min_rho,
                    max_rho: r.max_rho,
                    kind: r.kind.label(),
                    weight_pattern: r.weight_pattern.label(),
                    indicator_index: r.indicator_index,
                    correlation: r.correlation,
                    contribution: r.contribution,
                    relative_contribution: r.relative_contribution,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct BudgetWindowDocument {
    cases: usize,
    realized_correlations: Vec<f64>,
    realized_contributions: Vec<f64>,
    realized_relative: Vec<f64>,
    max_abs_relative_gap: f64,
}

impl BudgetWindowDocument {
    fn new(w: &composite_budget::WindowReport) -> Self {
        Self {
            cases: w.cases,
            realized_correlations: w.realized_correlations.iter().copied().collect(),
            realized_contributions: w.realized_contributions.iter().copied().collect(),
            realized_relative: w.realized_relative.iter().copied().collect(),
            max_abs_relative_gap: w.max_abs_relative_gap,
        }
    }
}

#[derive(Serialize)]
struct BudgetDocument {
    tool: ToolInfo,
    asset_labels: Vec<String>,
    effective_weights: Vec<f64>,
    target_relative: Vec<f64>,
    regularized: bool,
    estimation_window: usize,
    in_sample: BudgetWindowDocument,
    #[serde(skip_serializing_if = "Option::is_none")]
    holdout: Option<BudgetWindowDocument>,
}

impl BudgetDocument {
    fn new(report: &BudgetReport) -> Self {
        Self {
            tool: ToolInfo::current(),
            asset_labels: report.asset_labels.clone(),
            effective_weights: report.effective_weights.iter().copied().collect(),
            target_relative: report.target_relative.iter().copied().collect(),
            regularized: report.regularized,
            estimation_window: report.estimation_window,
            in_sample: BudgetWindowDocument::new(&report.in_sample),
            holdout: report.holdout.as_ref().map(BudgetWindowDocument::new),
        }
    }
}
