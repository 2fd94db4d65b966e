// SPDX-License-Identifier: Apache-2.0

//! `cpval`: compound p-value analyses, simulations and power curves.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cpval_core::analysis::{analyze, default_alpha_grid, AnalysisConfig, TrainingSpec};
use cpval_core::io::{ingest, ReadOptions};
use cpval_core::numerics::Probability;
use cpval_core::power::region_boundary;
use cpval_core::procedures::{Procedure, DEFAULT_QVALUE_LAMBDA};
use cpval_core::report;
use cpval_core::simulation::{run_study, CompoundMode, SimConfig, STUDY_CELLS, STUDY_LAMBDA2};

#[derive(Parser)]
#[command(
    name = "cpval",
    version,
    about = "Compound p-values for multiple testing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo power and error-rate study.
    Simulate(SimulateArgs),
    /// Two-group analysis of a data matrix.
    Analyze(AnalyzeArgs),
    /// Boundary λ² below which the Oracle test beats the simple test.
    PowerCurves(PowerCurveArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// Comma-separated θ:τ pairs.
    #[arg(long, value_delimiter = ',', value_parser = parse_cell)]
    cells: Option<Vec<(f64, f64)>>,
    /// Training fractions λ².
    #[arg(long, value_delimiter = ',')]
    lambda2: Option<Vec<f64>>,
    /// Estimated-p families with ε = k·λ for each k.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    eps_multiples: Vec<f64>,
    /// Fixed-p compound families.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0])]
    fixed_p: Vec<f64>,
    #[arg(long, default_value_t = 5000)]
    m: usize,
    /// Number of alternatives (the first M1 hypotheses).
    #[arg(long, default_value_t = 1000)]
    m1: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Monte Carlo replicates per cell.
    #[arg(long, default_value_t = 200)]
    replicates: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_QVALUE_LAMBDA)]
    qvalue_lambda: f64,
    /// Writes PREFIX.table.txt and PREFIX.records.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Detect {
    Auto,
    Yes,
    No,
}

impl Detect {
    fn flag(self) -> Option<bool> {
        match self {
            Detect::Auto => None,
            Detect::Yes => Some(true),
            Detect::No => Some(false),
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Delimited matrix, one row per hypothesis.
    #[arg(long)]
    data: PathBuf,
    /// Group label (1 or 2) of each data column.
    #[arg(long)]
    labels: PathBuf,
    #[arg(long, value_enum, default_value_t = Detect::Auto)]
    header: Detect,
    #[arg(long, value_enum, default_value_t = Detect::Auto)]
    row_ids: Detect,
    /// 1-based training columns.
    #[arg(long, value_delimiter = ',', conflicts_with = "train_fraction")]
    train_cols: Option<Vec<usize>>,
    /// Random stratified training split of this fraction of the columns.
    #[arg(long)]
    train_fraction: Option<f64>,
    /// ε values for estimated-p families.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0])]
    eps: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0])]
    fixed_p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = ["bh".to_string(), "q".to_string()])]
    procedures: Vec<String>,
    /// Defaults to .01, .02, ..., .20.
    #[arg(long, value_delimiter = ',')]
    alphas: Option<Vec<f64>>,
    #[arg(long, default_value_t = DEFAULT_QVALUE_LAMBDA)]
    qvalue_lambda: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Writes PREFIX.table.txt and PREFIX.records.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PowerCurveArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.001, 0.0001, 0.00001])]
    etas: Vec<f64>,
    /// Explicit μ grid; defaults to -6..6 in steps of 0.1 without 0.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    mu: Option<Vec<f64>>,
    /// Output file of eta,mu,lambda2_star rows.
    #[arg(long)]
    out: PathBuf,
}

fn parse_cell(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected theta:tau, got '{s}'"))?;
    let theta = a
        .trim()
        .parse()
        .map_err(|_| format!("bad theta in '{s}'"))?;
    let tau = b.trim().parse().map_err(|_| format!("bad tau in '{s}'"))?;
    Ok((theta, tau))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let cells = args.cells.unwrap_or_else(|| STUDY_CELLS.to_vec());
    let lambda2 = args.lambda2.unwrap_or_else(|| STUDY_LAMBDA2.to_vec());
    let alpha = Probability::new(args.alpha)?;
    let modes: Vec<CompoundMode> = args
        .eps_multiples
        .iter()
        .map(|&k| CompoundMode::EpsilonMultiple(k))
        .chain(args.fixed_p.iter().map(|&p| CompoundMode::FixedP(p)))
        .collect();
    let grid: Vec<SimConfig> = cells
        .iter()
        .flat_map(|&(theta, tau)| lambda2.iter().map(move |&l2| (theta, tau, l2)))
        .map(|(theta, tau, l2)| SimConfig {
            m: args.m,
            m1: args.m1,
            theta,
            tau,
            lambda2: l2,
            compound_modes: modes.clone(),
            alpha,
            replicates: args.replicates,
            seed: args.seed,
            qvalue_lambda: args.qvalue_lambda,
        })
        .collect();
    let result = run_study(&grid)?;
    write(
        &with_suffix(&args.out, ".table.txt"),
        &report::simulation_table(&result),
    )?;
    write(
        &with_suffix(&args.out, ".records.txt"),
        &report::simulation_records(&result),
    )?;
    Ok(())
}

fn run_analysis(args: AnalyzeArgs) -> Result<()> {
    let opts = ReadOptions {
        header: args.header.flag(),
        row_ids: args.row_ids.flag(),
        delimiter: None,
    };
    let (matrix, groups) = ingest(&args.data, &args.labels, &opts).with_context(|| {
        format!(
            "reading {} and {}",
            args.data.display(),
            args.labels.display()
        )
    })?;
    let training = match (args.train_cols, args.train_fraction) {
        (Some(cols), None) => {
            if let Some(&c) = cols.iter().find(|&&c| c == 0) {
                bail!("training columns are 1-based, got {c}");
            }
            TrainingSpec::Columns(cols.iter().map(|c| c - 1).collect())
        }
        (None, Some(f)) => TrainingSpec::Fraction(f),
        _ => bail!("give exactly one of --train-cols and --train-fraction"),
    };
    let procedures = args
        .procedures
        .iter()
        .map(|s| s.parse::<Procedure>())
        .collect::<cpval_core::Result<Vec<_>>>()?;
    let config = AnalysisConfig {
        training,
        epsilons: args.eps,
        fixed_p: args.fixed_p,
        procedures,
        alphas: args.alphas.unwrap_or_else(default_alpha_grid),
        qvalue_lambda: args.qvalue_lambda,
        seed: args.seed,
    };
    let result = analyze(&matrix, &groups, &config)?;
    write(
        &with_suffix(&args.out, ".table.txt"),
        &report::analysis_table(&result),
    )?;
    write(
        &with_suffix(&args.out, ".records.txt"),
        &report::analysis_records(&result),
    )?;
    Ok(())
}

fn power_curves(args: PowerCurveArgs) -> Result<()> {
    let mu = args.mu.unwrap_or_else(|| {
        (-60..=60)
            .filter(|&i| i != 0)
            .map(|i| f64::from(i) / 10.0)
            .collect()
    });
    let boundaries = args
        .etas
        .iter()
        .map(|&eta| region_boundary(&mu, Probability::new(eta)?))
        .collect::<cpval_core::Result<Vec<_>>>()?;
    write(
        &args.out,
        &report::power_curve_text(&args.etas, &mu, &boundaries),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Analyze(a) => run_analysis(a),
        Command::PowerCurves(a) => power_curves(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
