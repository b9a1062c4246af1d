//! Command-line interface: fitting, strategy comparison, the CPI window
//! sweep, tableau tracing, and brute-force oracle checks.

mod json;
mod render;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use l1fit::data::{evaluate_sar, DataSet, LineParams, Tolerance};
use l1fit::datasets::{all_cpi_windows, cpi_window, fixture, load_csv_path};
use l1fit::error::Error;
use l1fit::oracle::brute_force_best;
use l1fit::pivot::ColumnPolicy;
use l1fit::solver::{
    fit, fit_traced, FitReport, StartMode, Strategy, StrategyOptions, Uniqueness,
};

#[derive(Parser)]
#[command(
    name = "l1fit",
    about = "Least-absolute-residuals straight-line fitting",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit one data set and report the line, SAR*, and uniqueness.
    Fit(FitArgs),
    /// Fit all 171 CPI windows and print the uniqueness and SAR* triangles.
    SweepCpi(SweepArgs),
    /// Run several strategies side by side on one data set.
    Compare(CompareArgs),
    /// Brute-force all interpolation pairs and check the solver against it.
    Oracle(OracleArgs),
    /// Print every condensed tableau from initialization to convergence.
    Trace(TraceArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Br,
    Wm,
    Hybrid,
    RestartedWm,
    WmPure,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Br => Strategy::Br,
            StrategyArg::Wm => Strategy::Wm,
            StrategyArg::Hybrid => Strategy::Hybrid,
            StrategyArg::RestartedWm => Strategy::RestartedWm,
            StrategyArg::WmPure => Strategy::WmPure,
        }
    }
}

impl StrategyArg {
    fn name(self) -> &'static str {
        match self {
            StrategyArg::Br => "br",
            StrategyArg::Wm => "wm",
            StrategyArg::Hybrid => "hybrid",
            StrategyArg::RestartedWm => "restarted-wm",
            StrategyArg::WmPure => "wm-pure",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ColumnArg {
    MaxMc,
    InterceptFirst,
    SlopeFirst,
}

impl From<ColumnArg> for ColumnPolicy {
    fn from(c: ColumnArg) -> Self {
        match c {
            ColumnArg::MaxMc => ColumnPolicy::MaxMarginalCost,
            ColumnArg::InterceptFirst => ColumnPolicy::InterceptFirst,
            ColumnArg::SlopeFirst => ColumnPolicy::SlopeFirst,
        }
    }
}

impl ColumnArg {
    fn name(self) -> &'static str {
        match self {
            ColumnArg::MaxMc => "max-mc",
            ColumnArg::InterceptFirst => "intercept-first",
            ColumnArg::SlopeFirst => "slope-first",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WeightsArg {
    /// weights as they appear in the input
    Embedded,
    /// force every weight to 1
    Uniform,
}

#[derive(Args, Clone)]
struct CommonFitArgs {
    /// `fixture:NAME`, `cpi:L{len}S{start}`, or a CSV file path
    input: String,
    #[arg(long, value_enum, default_value = "hybrid")]
    strategy: StrategyArg,
    /// `cold`, `l2`, or `trial:A1,A2`
    #[arg(long, default_value = "cold")]
    start: String,
    #[arg(long, value_enum, default_value = "max-mc")]
    column: ColumnArg,
    /// decision threshold (default 1e-11)
    #[arg(long)]
    toler: Option<f64>,
    /// normalize by max |t| and max |d| before solving
    #[arg(long)]
    scale: bool,
    #[arg(long, value_enum, default_value = "embedded")]
    weights: WeightsArg,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_enum, default_value = "hybrid")]
    strategy: StrategyArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CompareArgs {
    input: String,
    /// comma-separated: br, wm, hybrid, restarted-wm, wm-pure, l2-start
    #[arg(long, required = true)]
    strategies: String,
    #[arg(long, value_enum, default_value = "embedded")]
    weights: WeightsArg,
}

#[derive(Args)]
struct OracleArgs {
    input: String,
    /// refuse inputs larger than this (the search is cubic)
    #[arg(long, default_value_t = 2000)]
    cap: usize,
    #[arg(long, value_enum, default_value = "embedded")]
    weights: WeightsArg,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonFitArgs,
    /// allow full dumps beyond 50 rows
    #[arg(long)]
    force: bool,
}

enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 3,
            CliError::Lib(e) => match e {
                Error::CyclingDetected { .. } => 2,
                Error::NonPositivePivot
                | Error::IterationLimitExceeded { .. }
                | Error::NotConverged
                | Error::ShapeMismatch => 4,
                _ => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Lib(e) => e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not errors
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let result = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::SweepCpi(args) => cmd_sweep_cpi(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Trace(args) => cmd_trace(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if let CliError::Lib(Error::CyclingDetected { partial }) = &e {
                render::print_cycle_report(partial);
            }
            ExitCode::from(e.exit_code())
        }
    }
}

/// Resolve `fixture:NAME`, `cpi:LxSy`, or a file path into a data set.
fn load_input(address: &str, weights: WeightsArg) -> Result<DataSet, CliError> {
    let ds = if let Some(name) = address.strip_prefix("fixture:") {
        fixture(name)?
    } else if let Some(window) = address.strip_prefix("cpi:") {
        let (length, start) = parse_window_name(window)
            .ok_or_else(|| CliError::Usage(format!("bad CPI window name `{window}`")))?;
        cpi_window(length, start)?
    } else {
        load_csv_path(Path::new(address))?
    };
    Ok(match weights {
        WeightsArg::Embedded => ds,
        WeightsArg::Uniform => ds.with_uniform_weights(),
    })
}

fn parse_window_name(name: &str) -> Option<(usize, usize)> {
    let rest = name.strip_prefix('L')?;
    let (length, start) = rest.split_once('S')?;
    Some((length.parse().ok()?, start.parse().ok()?))
}

fn parse_start_mode(text: &str) -> Result<StartMode, CliError> {
    match text {
        "cold" => Ok(StartMode::Cold),
        "l2" => Ok(StartMode::L2Start),
        s => {
            let body = s
                .strip_prefix("trial:")
                .or_else(|| s.strip_prefix("trial="))
                .ok_or_else(|| {
                    CliError::Usage(format!("bad --start `{s}` (cold, l2, or trial:A1,A2)"))
                })?;
            let (a1, a2) = body.split_once(',').ok_or_else(|| {
                CliError::Usage(format!("bad trial line `{body}` (expected A1,A2)"))
            })?;
            let parse = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad trial number `{v}`")))
            };
            Ok(StartMode::Trial(LineParams::new(parse(a1)?, parse(a2)?)))
        }
    }
}

fn build_options(common: &CommonFitArgs) -> Result<StrategyOptions, CliError> {
    let tol = match common.toler {
        Some(t) => Tolerance::new(t).map_err(|_| {
            CliError::Usage(format!("--toler must be positive and finite, got {t}"))
        })?,
        None => Tolerance::default(),
    };
    Ok(StrategyOptions {
        strategy: common.strategy.into(),
        start: parse_start_mode(&common.start)?,
        column_policy: common.column.into(),
        tol,
        max_iterations: None,
        scaling: common.scale,
        degenerate_flip: true,
        safeguard: true,
    })
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let ds = load_input(&args.common.input, args.common.weights)?;
    let opts = build_options(&args.common)?;
    let report = fit(&ds, &opts)?;
    if args.json {
        let doc = json::fit_report(&args.common.input, &args.common, &report);
        println!("{}", serde_json::to_string_pretty(&doc).expect("serialize"));
    } else {
        render::print_fit_report(&ds, &report);
    }
    Ok(())
}

fn cmd_sweep_cpi(args: SweepArgs) -> Result<(), CliError> {
    let opts = StrategyOptions {
        strategy: args.strategy.into(),
        ..Default::default()
    };
    let mut rows: Vec<(String, usize, usize, FitReport)> = Vec::with_capacity(171);
    for (w, ds) in all_cpi_windows() {
        let report = fit(&ds, &opts)?;
        rows.push((w.name(), w.length, w.start, report));
    }

    // vertical pairs (same start, length + 1) with identical optima
    let mut equal_pairs: Vec<(String, String)> = Vec::new();
    for (name, length, start, report) in &rows {
        if let Some((below, _, _, other)) = rows
            .iter()
            .find(|(_, l, s, _)| *l == length + 1 && s == start)
            .map(|(n, l, s, r)| (n.clone(), l, s, r))
        {
            if (report.sar - other.sar).abs() <= 1e-9 {
                equal_pairs.push((name.clone(), below));
            }
        }
    }

    if args.json {
        let doc = json::sweep_report(args.strategy.name(), &rows, &equal_pairs);
        println!("{}", serde_json::to_string_pretty(&doc).expect("serialize"));
    } else {
        render::print_sweep(&rows, &equal_pairs);
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), CliError> {
    let ds = load_input(&args.input, args.weights)?;
    let names: Vec<&str> = args
        .strategies
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(CliError::Usage("--strategies must name at least one".into()));
    }
    let mut columns = Vec::new();
    for name in &names {
        let opts = match *name {
            "br" => StrategyOptions {
                strategy: Strategy::Br,
                ..Default::default()
            },
            "wm" => StrategyOptions {
                strategy: Strategy::Wm,
                ..Default::default()
            },
            "hybrid" => StrategyOptions::default(),
            "restarted-wm" => StrategyOptions {
                strategy: Strategy::RestartedWm,
                ..Default::default()
            },
            "wm-pure" => StrategyOptions {
                strategy: Strategy::WmPure,
                ..Default::default()
            },
            "l2-start" => StrategyOptions {
                strategy: Strategy::Br,
                start: StartMode::L2Start,
                ..Default::default()
            },
            other => {
                return Err(CliError::Usage(format!("unknown strategy `{other}`")))
            }
        };
        columns.push(render::compare_column(&ds, name, &opts));
    }
    render::print_compare(&args.input, &columns);
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<(), CliError> {
    let ds = load_input(&args.input, args.weights)?;
    if ds.len() > args.cap {
        return Err(CliError::Usage(format!(
            "input has {} points, above the oracle cap of {} (the pair search is cubic)",
            ds.len(),
            args.cap
        )));
    }
    let truth = brute_force_best(&ds)?;
    let solver = fit(&ds, &StrategyOptions::default())?;

    println!("input: {} (m = {})", args.input, ds.len());
    println!("sar* = {}", render::fmt_num(truth.sar_star));
    println!("optimal interpolation pairs ({}):", truth.optimal_pairs.len());
    for &(i, j) in &truth.optimal_pairs {
        let (a, b) = (&ds.points()[i], &ds.points()[j]);
        println!(
            "  rows ({i}, {j})  t = ({}, {})",
            render::fmt_num(a.t),
            render::fmt_num(b.t)
        );
    }
    println!("optimal lines ({}):", truth.lines.len());
    for line in &truth.lines {
        println!(
            "  a1={} a2={}",
            render::fmt_num(line.a1),
            render::fmt_num(line.a2)
        );
    }
    let diff = (solver.sar - truth.sar_star).abs();
    println!(
        "solver agreement: hybrid SAR {} ({})",
        render::fmt_num(solver.sar),
        if diff <= 1e-9 {
            "agrees".to_string()
        } else {
            format!("DISAGREES by {diff:e}")
        }
    );
    Ok(())
}

fn cmd_trace(args: TraceArgs) -> Result<(), CliError> {
    let ds = load_input(&args.common.input, args.common.weights)?;
    if ds.len() > 50 && !args.force {
        return Err(CliError::Usage(format!(
            "{} rows is too many for a full tableau dump; pass --force to override",
            ds.len()
        )));
    }
    let opts = build_options(&args.common)?;
    println!(
        "input: {} (m = {}), strategy: {}, start: {}, column: {}",
        args.common.input,
        ds.len(),
        args.common.strategy.name(),
        args.common.start,
        args.common.column.name()
    );
    let mut observer = |tab: &l1fit::tableau::CondensedTableau,
                        rec: Option<&l1fit::solver::IterationRecord>| {
        render::print_tableau_step(tab, rec);
    };
    let report = fit_traced(&ds, &opts, &mut observer)?;
    println!(
        "converged: a1={} a2={} SAR*={} after {} iterations",
        render::fmt_num(report.line.a1),
        render::fmt_num(report.line.a2),
        render::fmt_num(report.sar),
        report.iterations.len()
    );
    Ok(())
}

// referenced from render/json; kept here so both modules share one copy
pub(crate) fn initial_sar(ds: &DataSet, report: &FitReport) -> f64 {
    match &report.components {
        Some(c) => evaluate_sar(ds, &c.base),
        None => evaluate_sar(ds, &LineParams::new(0.0, 0.0)),
    }
}

pub(crate) fn uniqueness_word(u: &Uniqueness) -> &'static str {
    match u {
        Uniqueness::Unique => "unique",
        Uniqueness::NonUnique { .. } => "non-unique",
        Uniqueness::Undetermined { .. } => "undetermined",
    }
}
