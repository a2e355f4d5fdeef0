//! `fcmp`: compare forecast accuracy on data files and reproduce the size
//! and limiting-distribution tables of the underlying study.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical
//! degeneracy (no testable difference).

mod input;

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fcmp_core::accuracy::{dm_nw_test, gw_test, subsample_t_test, LagRule, Reference, TestResult};
use fcmp_core::asymptotics::{table2_rows, vm, gamma_d, long_run_variance_analytic, Table2Row};
use fcmp_core::dgp::lognormal_neg_moments;
use fcmp_core::harness::{reproduce_table1, RejectionSummary, TableGrid};
use fcmp_core::series::{loss_diff_squared_error, Series};
use fcmp_core::{Error as CoreError, RandomStream};

#[derive(Parser)]
#[command(name = "fcmp", version, about = "Equal-predictive-accuracy tests and their size laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the accuracy tests on a csv file with columns y, f1, f2
    Evaluate(EvaluateArgs),
    /// Monte Carlo rejection rates of the three tests over a (sigma, m, n) grid
    Table1(Table1Args),
    /// Quantiles of the expanding-window limiting distribution per lambda
    Table2(Table2Args),
    /// Closed-form asymptotic variance of the scaled statistic
    Vm(VmArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    /// Input file: comma-separated, UTF-8, header row y,f1,f2 in any order
    path: PathBuf,
    /// Comma-separated subset of gw,dm,sub
    #[arg(long, default_value = "gw,dm,sub")]
    tests: String,
    /// Two-sided test level
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Block count for the subsample test
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Newey-West lag choice: "textbook" or an explicit count
    #[arg(long, default_value = "textbook")]
    lags: String,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
    /// Write the report to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Table1Args {
    /// TOML config file; command-line flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// Innovation shape parameters (comma-separated)
    #[arg(long, value_delimiter = ',')]
    sigma: Vec<f64>,
    /// Rolling window lengths (comma-separated)
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
    /// Evaluation sample lengths (comma-separated)
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Monte Carlo replications per cell
    #[arg(long)]
    reps: Option<usize>,
    /// Master seed (required here or in the config file)
    #[arg(long)]
    seed: Option<u64>,
    /// Two-sided test level
    #[arg(long)]
    alpha: Option<f64>,
    /// Block count for the subsample test
    #[arg(long)]
    k: Option<usize>,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the csv table to this path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of the console table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct Table2Args {
    /// Window fractions in (0,1), comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    /// Simulated paths per lambda
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    /// Brownian grid steps per path
    #[arg(long, default_value_t = 20_000)]
    grid: usize,
    /// Master seed
    #[arg(long, required = true)]
    seed: u64,
    /// Worker threads (results do not depend on this)
    #[arg(long)]
    workers: Option<usize>,
    /// Write the csv table to this path
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit JSON instead of the console table
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VmArgs {
    /// Rolling window length
    #[arg(long)]
    m: usize,
    /// Lognormal shape parameter (computes the innovation moments)
    #[arg(long, conflicts_with_all = ["kappa1", "kappa2"])]
    sigma: Option<f64>,
    /// Third innovation moment
    #[arg(long, requires = "kappa2")]
    kappa1: Option<f64>,
    /// Fourth innovation moment
    #[arg(long, requires = "kappa1")]
    kappa2: Option<f64>,
}

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path with status 0
            if e.use_stderr() {
                eprint!("{e}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.command {
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Table1(args) => cmd_table1(args),
        Command::Table2(args) => cmd_table2(args),
        Command::Vm(args) => cmd_vm(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CmdError {
    code: u8,
    message: String,
}

impl CmdError {
    fn usage(message: impl Into<String>) -> Self {
        CmdError { code: EXIT_USAGE, message: message.into() }
    }
    fn data(message: impl Into<String>) -> Self {
        CmdError { code: EXIT_DATA, message: message.into() }
    }
}

impl From<CoreError> for CmdError {
    fn from(e: CoreError) -> Self {
        let code = match e {
            CoreError::Degenerate(_) => EXIT_DEGENERATE,
            CoreError::Domain(_) | CoreError::InsufficientData(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        CmdError { code, message: e.to_string() }
    }
}

/// 17 significant digits: enough for an exact f64 round-trip.
fn sig17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<(), CmdError> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| CmdError::data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EvaluateReport {
    rows: usize,
    alpha: f64,
    tests: Vec<TestReport>,
}

#[derive(Serialize)]
struct TestReport {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    statistic: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reference: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reject: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nw_lags: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    k_blocks: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn reference_label(r: Reference) -> String {
    match r {
        Reference::StdNormal => "N(0,1)".to_string(),
        Reference::StudentT(df) => format!("t({df})"),
    }
}

fn test_report(name: &str, outcome: Result<TestResult, CoreError>, alpha: f64) -> (TestReport, bool) {
    match outcome {
        Ok(r) => (
            TestReport {
                name: name.to_string(),
                statistic: Some(r.statistic),
                reference: Some(reference_label(r.reference)),
                p_value: Some(r.p_value),
                reject: Some(r.reject_at(alpha)),
                nw_lags: r.nuisance.nw_lags,
                k_blocks: r.nuisance.k_blocks,
                error: None,
            },
            false,
        ),
        Err(e) => (
            TestReport {
                name: name.to_string(),
                statistic: None,
                reference: None,
                p_value: None,
                reject: None,
                nw_lags: None,
                k_blocks: None,
                error: Some(e.to_string()),
            },
            matches!(e, CoreError::Degenerate(_)),
        ),
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<ExitCode, CmdError> {
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(CmdError::usage(format!("alpha {} not in (0, 1)", args.alpha)));
    }
    let lag_rule = match args.lags.as_str() {
        "textbook" => LagRule::Textbook,
        other => LagRule::Explicit(
            other
                .parse()
                .map_err(|_| CmdError::usage(format!("--lags must be \"textbook\" or an integer, got {other:?}")))?,
        ),
    };
    let requested: Vec<&str> = args.tests.split(',').map(str::trim).collect();
    for t in &requested {
        if !matches!(*t, "gw" | "dm" | "sub") {
            return Err(CmdError::usage(format!("unknown test {t:?}; expected gw, dm, sub")));
        }
    }

    let data = input::read_evaluation_file(&args.path).map_err(CmdError::data)?;
    let n = data.y.len();
    let y = Series::new(data.y, 1).map_err(|e| CmdError::data(e.to_string()))?;
    let f1 = Series::new(data.f1, 1).map_err(|e| CmdError::data(e.to_string()))?;
    let f2 = Series::new(data.f2, 1).map_err(|e| CmdError::data(e.to_string()))?;
    let dl = loss_diff_squared_error(&y, &f1, &f2).map_err(|e| CmdError::data(e.to_string()))?;

    let mut tests = Vec::new();
    let mut degenerate = 0usize;
    for name in &requested {
        let outcome = match *name {
            "gw" => gw_test(&dl),
            "dm" => dm_nw_test(&dl, lag_rule),
            "sub" => subsample_t_test(&dl, args.k),
            _ => unreachable!(),
        };
        // a Domain/InsufficientData error here is a bad flag combination
        if let Err(e) = &outcome {
            if matches!(e, CoreError::Domain(_) | CoreError::InsufficientData(_)) {
                return Err(CmdError::usage(e.to_string()));
            }
        }
        let (report, is_degenerate) = test_report(name, outcome, args.alpha);
        degenerate += usize::from(is_degenerate);
        tests.push(report);
    }

    let report = EvaluateReport { rows: n, alpha: args.alpha, tests };
    let content = if args.json {
        serde_json::to_string_pretty(&report).expect("serializable report") + "\n"
    } else {
        render_evaluate_table(&report)
    };
    write_or_print(&args.out, &content)?;

    if degenerate == report.tests.len() {
        eprintln!("error: no testable difference between the forecasts");
        return Ok(ExitCode::from(EXIT_DEGENERATE));
    }
    Ok(ExitCode::SUCCESS)
}

fn render_evaluate_table(report: &EvaluateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "rows: {}   alpha: {}", report.rows, report.alpha);
    let _ = writeln!(
        s,
        "{:<5} {:>14} {:>8} {:>12} {:>8}  nuisance",
        "test", "statistic", "ref", "p-value", "reject"
    );
    for t in &report.tests {
        match t.error.as_ref() {
            None => {
                let nuisance = match (t.nw_lags, t.k_blocks) {
                    (Some(l), _) => format!("nw_lags={l}"),
                    (_, Some(k)) => format!("K={k}"),
                    _ => String::new(),
                };
                let _ = writeln!(
                    s,
                    "{:<5} {:>14.6} {:>8} {:>12.6} {:>8}  {}",
                    t.name,
                    t.statistic.unwrap(),
                    t.reference.as_deref().unwrap_or(""),
                    t.p_value.unwrap(),
                    if t.reject.unwrap() { "yes" } else { "no" },
                    nuisance
                );
            }
            Some(err) => {
                let _ = writeln!(s, "{:<5} degenerate: {err}", t.name);
            }
        }
    }
    s
}

// ---------------------------------------------------------------------------
// table1
// ---------------------------------------------------------------------------

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct Table1Config {
    seed: Option<u64>,
    replications: Option<usize>,
    alpha: Option<f64>,
    k: Option<usize>,
    sigmas: Option<Vec<f64>>,
    windows: Option<Vec<usize>>,
    samples: Option<Vec<usize>>,
    workers: Option<usize>,
}

fn cmd_table1(args: Table1Args) -> Result<ExitCode, CmdError> {
    let file_cfg: Table1Config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CmdError::data(format!("cannot read {}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| CmdError::data(format!("bad config {}: {e}", path.display())))?
        }
        None => Table1Config::default(),
    };

    let sigmas = if args.sigma.is_empty() {
        file_cfg.sigmas.unwrap_or_else(|| vec![0.5, 1.0, 1.5])
    } else {
        args.sigma
    };
    let windows = if args.m.is_empty() {
        file_cfg.windows.unwrap_or_else(|| vec![3, 5, 10, 30])
    } else {
        args.m
    };
    let samples = if args.n.is_empty() {
        file_cfg.samples.unwrap_or_else(|| vec![100, 200, 1000])
    } else {
        args.n
    };
    let replications = args.reps.or(file_cfg.replications).unwrap_or(2000);
    let alpha = args.alpha.or(file_cfg.alpha).unwrap_or(0.05);
    let k = args.k.or(file_cfg.k).unwrap_or(2);
    let workers = args.workers.or(file_cfg.workers);
    let seed = args
        .seed
        .or(file_cfg.seed)
        .ok_or_else(|| CmdError::usage("--seed is required (flag or config file)"))?;

    for &s in &sigmas {
        if !s.is_finite() || s <= 0.0 {
            return Err(CmdError::usage(format!("sigma must be positive, got {s}")));
        }
    }
    let grid = TableGrid { sigmas, windows, samples };
    let table = reproduce_table1(&grid, replications, alpha, k, seed, workers)?;

    let csv = table1_csv(&table);
    if let Some(path) = &args.out {
        fs::write(path, &csv)
            .map_err(|e| CmdError::data(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&table).expect("serializable table"));
    } else {
        print!("{}", render_table1(&table));
        if args.out.is_none() {
            println!();
            print!("{csv}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn table1_csv(table: &[RejectionSummary]) -> String {
    let mut s = String::from("sigma,m,n,test,rejection_rate,mc_se,degenerate_count\n");
    for cell in table {
        for tally in &cell.tallies {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{}",
                sig17(cell.sigma.unwrap_or(f64::NAN)),
                cell.m,
                cell.n,
                tally.test,
                sig17(tally.rate),
                sig17(tally.mc_se),
                tally.degenerate
            );
        }
    }
    s
}

fn render_table1(table: &[RejectionSummary]) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:>6} {:>6} {:>7}  {}",
        "sigma",
        "m",
        "n",
        table
            .first()
            .map(|c| c.tallies.iter().map(|t| format!("{:>8}", t.test)).collect::<String>())
            .unwrap_or_default()
    );
    for cell in table {
        let rates: String = cell.tallies.iter().map(|t| format!("{:>8.4}", t.rate)).collect();
        let _ = writeln!(
            s,
            "{:>6} {:>6} {:>7}  {}",
            cell.sigma.map_or("-".to_string(), |v| format!("{v}")),
            cell.m,
            cell.n,
            rates
        );
    }
    let degenerate: usize = table
        .iter()
        .flat_map(|c| c.tallies.iter().map(|t| t.degenerate))
        .sum();
    if degenerate > 0 {
        let _ = writeln!(s, "warning: {degenerate} degenerate replications excluded");
    }
    s
}

// ---------------------------------------------------------------------------
// table2
// ---------------------------------------------------------------------------

fn cmd_table2(args: Table2Args) -> Result<ExitCode, CmdError> {
    if args.lambda.is_empty() {
        return Err(CmdError::usage("need at least one --lambda value"));
    }
    let key = RandomStream::new(args.seed);
    let rows: Vec<Table2Row> =
        table2_rows(&args.lambda, args.grid, args.paths, key, args.workers)?;

    let mut csv = String::from("lambda,q95_abs,size_at_196\n");
    for row in &rows {
        let _ = writeln!(csv, "{},{},{}", sig17(row.lambda), sig17(row.q95_abs), sig17(row.size_at_196));
    }
    if let Some(path) = &args.out {
        fs::write(path, &csv)
            .map_err(|e| CmdError::data(format!("cannot write {}: {e}", path.display())))?;
    }
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("serializable rows"));
    } else {
        println!("{:>8} {:>10} {:>12}", "lambda", "q95|draw|", "size@1.96");
        for row in &rows {
            println!("{:>8} {:>10.3} {:>12.4}", row.lambda, row.q95_abs, row.size_at_196);
        }
        if args.out.is_none() {
            println!();
            print!("{csv}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// vm
// ---------------------------------------------------------------------------

fn cmd_vm(args: VmArgs) -> Result<ExitCode, CmdError> {
    let (kappa1, kappa2) = match (args.sigma, args.kappa1, args.kappa2) {
        (Some(sigma), None, None) => {
            let m = lognormal_neg_moments(sigma)?;
            (m.kappa1, m.kappa2)
        }
        (None, Some(k1), Some(k2)) => (k1, k2),
        _ => {
            return Err(CmdError::usage(
                "provide either --sigma or both --kappa1 and --kappa2",
            ))
        }
    };
    let v = vm(args.m, kappa1, kappa2)?;
    let c = 1.0 / (args.m as f64).sqrt();
    println!("kappa1 = {kappa1}");
    println!("kappa2 = {kappa2}");
    println!("V_m    = {v}");
    if v > 1.0 {
        println!("note: exceeds 1, the variance under a correct martingale-difference scaling");
    }
    let cap = args.m.min(30);
    for d in 0..=cap {
        println!("gamma_{d} = {}", gamma_d(args.m, d, kappa1, kappa2, c));
    }
    if cap < args.m {
        println!("... (gamma_d printed only up to lag {cap}; zero beyond lag m)");
    }
    println!("long_run_variance = {}", long_run_variance_analytic(args.m, kappa1, kappa2, c));
    Ok(ExitCode::SUCCESS)
}
