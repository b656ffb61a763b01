//! Command-line entry point: analyze indicator tables, run population
//! sweeps, evaluate risk budgets.

mod input;
mod output;

use std::path::PathBuf;
use std::process;

use clap::{Args, Parser, Subcommand};
use composite_budget::{evaluate_budget, BudgetError, RiskBudgetSpec};
use composite_core::{
    analytic_composite, purely_analytic_composite, sample_correlation, standardize, CoreError,
    RegularizationPolicy, WeightSpec,
};
use composite_sim::{default_weighted_pattern, run_sweep, SimError};

use input::read_indicators;
use output::{write_budget, write_reports, write_sweep, OutputConfig};

#[derive(Parser)]
#[command(
    name = "composite",
    version,
    about = "Weighted composites with exact a priori variance contributions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build analytic and purely analytic composites from an indicator file
    Analyze(AnalyzeArgs),
    /// Generate populations with controlled correlation spread and compare
    /// both composite kinds across them
    Simulate(SimulateArgs),
    /// Evaluate a variance-contribution risk budget on asset returns
    Riskbudget(RiskbudgetArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Directory for output files
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
    /// Field delimiter for inputs and text outputs
    #[arg(long, default_value_t = ',')]
    delimiter: char,
    /// Emit machine-readable JSON at full precision instead of text tables
    #[arg(long)]
    json: bool,
    /// Decimals in report tables and correlation files
    #[arg(long, default_value_t = 3)]
    table_decimals: usize,
    /// Decimals in score files
    #[arg(long, default_value_t = 4)]
    score_decimals: usize,
}

impl CommonArgs {
    fn output_config(&self) -> OutputConfig {
        OutputConfig {
            output_dir: self.output_dir.clone(),
            delimiter: self.delimiter,
            table_decimals: self.table_decimals,
            score_decimals: self.score_decimals,
            json: self.json,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input indicator table: rows are cases, columns are indicators
    #[arg(long)]
    input: PathBuf,
    /// A priori indicator weights, comma-separated, or "unit". Variance
    /// contributions come out proportional to the squared entries.
    #[arg(long, visible_alias = "weights", default_value = "unit")]
    targets: String,
    /// Skip one header line in the input
    #[arg(long)]
    header: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SimulateArgs {
    /// Indicator count
    #[arg(long, default_value_t = composite_sim::DEFAULT_P)]
    p: usize,
    /// Target sd(rho) grid as start:end:count
    #[arg(long, default_value = "0.01:0.23:6")]
    grid: String,
    /// Off-diagonal mean correlation of every population
    #[arg(long, default_value_t = composite_sim::DEFAULT_MEAN_RHO)]
    mean_rho: f64,
    /// Base seed; population i is generated with seed + i
    #[arg(long, default_value_t = composite_sim::DEFAULT_SEED)]
    seed: u64,
    /// Differential weight pattern, comma-separated or "unit". Defaults to
    /// weight 2 on the last two indicators, 1 elsewhere.
    #[arg(long, visible_alias = "weights")]
    targets: Option<String>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct RiskbudgetArgs {
    /// Input return table: rows are cases, columns are assets
    #[arg(long)]
    input: PathBuf,
    /// A priori asset weights, comma-separated, or "unit"; desired variance
    /// contributions are the squared entries
    #[arg(long, visible_alias = "weights", default_value = "unit")]
    targets: String,
    /// Comma-separated asset labels; defaults to asset1..assetp
    #[arg(long)]
    labels: Option<String>,
    /// Estimation window length; defaults to all input rows
    #[arg(long)]
    window: Option<usize>,
    /// Holdout return table evaluated with the in-sample weights
    #[arg(long)]
    holdout: Option<PathBuf>,
    /// Skip one header line in the inputs
    #[arg(long)]
    header: bool,
    #[command(flatten)]
    common: CommonArgs,
}

/// Post-parse failures: configuration problems exit 2, data problems exit 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }

    fn message(&self) -> String {
        let (kind, msg) = match self {
            CliError::Usage(m) => ("usage", m),
            CliError::Data(m) => ("data", m),
        };
        // keep the contract of a single machine-parsable stderr line
        format!("{kind}: {}", msg.replace('\n', " "))
    }
}

impl From<input::ReadError> for CliError {
    fn from(e: input::ReadError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<BudgetError> for CliError {
    fn from(e: BudgetError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<output::IoFailure> for CliError {
    fn from(e: output::IoFailure) -> Self {
        CliError::Data(format!("io: {e}"))
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => run_analyze(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Riskbudget(args) => run_riskbudget(args),
    };
    if let Err(e) = result {
        eprintln!("error: {}", e.message());
        process::exit(e.code());
    }
}

/// "unit" or a comma-separated positive weight vector of length p.
fn parse_weight_pattern(text: &str, p: usize) -> Result<WeightSpec, CliError> {
    if text.trim() == "unit" {
        return Ok(WeightSpec::unit(p));
    }
    let weights: Vec<f64> = text
        .split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("weight {f:?} is not a number")))
        })
        .collect::<Result<_, _>>()?;
    if weights.len() != p {
        return Err(CliError::Usage(format!(
            "{} weights given for {p} columns",
            weights.len()
        )));
    }
    WeightSpec::from_weights(weights).map_err(|e| CliError::Usage(e.to_string()))
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let config = args.common.output_config();
    let x = read_indicators(&args.input, config.delimiter, args.header)?;
    let spec = parse_weight_pattern(&args.targets, x.indicators())?;

    let z = standardize(&x)?;
    let r = sample_correlation(&z);
    let policy = RegularizationPolicy::default();
    let analytic = analytic_composite(&z, &r, &spec)?;
    let purely = purely_analytic_composite(&z, &r, &spec, &policy)?;

    let paths = write_reports(&analytic, &purely, &r, &spec, x.cases(), &config)?;
    let names = ["results", "correlations", "scores"];
    for (name, path) in names.iter().zip(paths.iter()) {
        println!("{name}: {}", path.display());
    }
    Ok(())
}

/// start:end:count
fn parse_grid_spec(text: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Usage(format!(
            "grid {text:?} is not start:end:count"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| CliError::Usage(format!("grid start {:?} is not a number", parts[0])))?;
    let end: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("grid end {:?} is not a number", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("grid count {:?} is not a count", parts[2])))?;
    if count == 0 || !(0.0..1.0).contains(&start) || !(0.0..1.0).contains(&end) || end < start {
        return Err(CliError::Usage(format!("grid {text:?} is out of range")));
    }
    Ok((start, end, count))
}

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let config = args.common.output_config();
    let (start, end, count) = parse_grid_spec(&args.grid)?;
    let grid = composite_sim::grid(args.p, args.mean_rho, start, end, count, args.seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let spec_weights = match &args.targets {
        Some(text) => parse_weight_pattern(text, args.p)?,
        None => default_weighted_pattern(args.p),
    };
    let unit = WeightSpec::unit(args.p);

    let sweep = run_sweep(&grid, &spec_weights, &unit)?;
    let path = write_sweep(&sweep, &config)?;
    println!("sweep: {}", path.display());
    Ok(())
}

fn run_riskbudget(args: RiskbudgetArgs) -> Result<(), CliError> {
    let config = args.common.output_config();
    let x = read_indicators(&args.input, config.delimiter, args.header)?;
    let p = x.indicators();
    let weights = parse_weight_pattern(&args.targets, p)?;
    let labels: Vec<String> = match &args.labels {
        Some(text) => {
            let labels: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
            if labels.len() != p {
                return Err(CliError::Usage(format!(
                    "{} labels given for {p} columns",
                    labels.len()
                )));
            }
            labels
        }
        None => (1..=p).map(|i| format!("asset{i}")).collect(),
    };
    let window = args.window.unwrap_or_else(|| x.cases());
    let spec = RiskBudgetSpec::new(
        labels,
        weights.variance_targets().iter().copied().collect(),
        window,
    )
    .map_err(|e| CliError::Usage(e.to_string()))?;

    let holdout = match &args.holdout {
        Some(path) => Some(read_indicators(path, config.delimiter, args.header)?),
        None => None,
    };

    let report = evaluate_budget(&x, &spec, holdout.as_ref())?;
    let path = write_budget(&report, &config)?;
    println!("budget: {}", path.display());
    Ok(())
}
