//! Command-line interface.
//!
//! Exit codes: 0 success, 1 runtime/data/budget error, 2 usage error. Errors
//! are written to standard error as one JSON object; `run` writes exactly one
//! JSON document to standard output.

use std::ffi::OsString;
use std::hash::{BuildHasher, RandomState};
use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use gramdp_core::bench::{
    default_epsilon_grid, epsilon_grid, run_sweep, SweepConfig, SweepQuery, DEFAULT_EPS_START,
    DEFAULT_EPS_STEP, DEFAULT_EPS_STOP, DEFAULT_ITERATIONS,
};
use gramdp_core::queries::LEVEL_EPSILONS;
use gramdp_core::{
    run_query, BoundedDomain, Privacy, PrivacyLevel, PrivacyParams, QueryKind, QuerySpec, RngStream,
};

use crate::error::{AppError, Result};
use crate::ingest::{load_csv, select_numeric_column, NumericColumn};
use crate::ledger::LedgerFile;
use crate::report::{emit_report, ReportFormat};

/// Fallback seed source when `--seed` is absent.
pub const SEED_ENV: &str = "GRAMDP_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "gramdp",
    version,
    about = "Differentially private statistics over CSV columns"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Answer one DP query and print the result as JSON.
    Run(RunArgs),
    /// Sweep epsilon, repeat the query, and write error metrics.
    Sweep(SweepArgs),
    /// Print the privacy level presets.
    Levels,
    /// Manage a privacy budget file.
    #[command(subcommand)]
    Budget(BudgetCommand),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum QueryArg {
    Count,
    Sum,
    Mean,
    Var,
}

impl From<QueryArg> for QueryKind {
    fn from(q: QueryArg) -> Self {
        match q {
            QueryArg::Count => QueryKind::Count,
            QueryArg::Sum => QueryKind::Sum,
            QueryArg::Mean => QueryKind::Mean,
            QueryArg::Var => QueryKind::Variance,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum LevelArg {
    VeryHigh,
    High,
    Moderate,
    Low,
    VeryLow,
}

impl From<LevelArg> for PrivacyLevel {
    fn from(l: LevelArg) -> Self {
        match l {
            LevelArg::VeryHigh => PrivacyLevel::VeryHigh,
            LevelArg::High => PrivacyLevel::High,
            LevelArg::Moderate => PrivacyLevel::Moderate,
            LevelArg::Low => PrivacyLevel::Low,
            LevelArg::VeryLow => PrivacyLevel::VeryLow,
        }
    }
}

fn positive_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be a positive finite number"))
    }
}

fn finite_f64(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} must be finite"))
    }
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Column to query.
    #[arg(long)]
    column: String,
    #[arg(long, value_enum)]
    query: QueryArg,
    /// Lower bound of the data domain. Omit both bounds to infer them (not private).
    #[arg(long, requires = "upper", allow_negative_numbers = true, value_parser = finite_f64)]
    lower: Option<f64>,
    /// Upper bound of the data domain.
    #[arg(long, requires = "lower", allow_negative_numbers = true, value_parser = finite_f64)]
    upper: Option<f64>,
    /// Do not clamp values into the bounds before aggregating.
    #[arg(long)]
    no_clamp_inputs: bool,
    #[arg(long)]
    seed: Option<u64>,
}

impl DataArgs {
    fn bounds(&self) -> Result<Option<BoundedDomain>> {
        match (self.lower, self.upper) {
            (Some(l), Some(u)) => BoundedDomain::new(l, u)
                .map(Some)
                .map_err(|e| AppError::Usage(e.to_string())),
            (None, None) => Ok(None),
            _ => Err(AppError::Usage(
                "--lower and --upper must be given together".into(),
            )),
        }
    }

    fn load(&self) -> Result<NumericColumn> {
        let table = load_csv(&self.data)?;
        select_numeric_column(&table, &self.column)
    }
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("privacy").required(true).args(["epsilon", "level"])))]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, value_parser = positive_f64)]
    epsilon: Option<f64>,
    #[arg(long, value_enum)]
    level: Option<LevelArg>,
    /// Ledger file to charge epsilon against.
    #[arg(long)]
    budget_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = DEFAULT_EPS_START)]
    eps_start: f64,
    #[arg(long, default_value_t = DEFAULT_EPS_STOP)]
    eps_stop: f64,
    #[arg(long, default_value_t = DEFAULT_EPS_STEP)]
    eps_step: f64,
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Debug, Subcommand)]
enum BudgetCommand {
    /// Create a new ledger file with a total epsilon.
    Init {
        #[arg(long, value_parser = positive_f64)]
        total: f64,
        #[arg(long)]
        file: PathBuf,
    },
    /// Print the remaining budget.
    Status {
        #[arg(long)]
        file: PathBuf,
    },
}

fn resolve_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(RandomState::new().hash_one(std::process::id())),
    }
}

fn warn(err: &mut dyn Write, msg: &str) {
    let _ = writeln!(err, "warning: {msg}");
}

fn cmd_run(args: RunArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let bounds = args.data.bounds()?;
    let seed = resolve_seed(args.data.seed)?;
    let privacy = match (args.epsilon, args.level) {
        (Some(e), None) => Privacy::Params(PrivacyParams::pure(e)?),
        (None, Some(l)) => Privacy::Level(l.into()),
        _ => {
            return Err(AppError::Usage(
                "give exactly one of --epsilon or --level".into(),
            ))
        }
    };
    let column = args.data.load()?;
    let kind: QueryKind = args.data.query.into();
    let mut spec = QuerySpec::new(kind, privacy).with_clamp_inputs(!args.data.no_clamp_inputs);
    spec.bounds = bounds;

    let result = run_query(&column, &spec, &mut RngStream::from_seed(seed))?;

    if let Some(path) = &args.budget_file {
        let label = format!("run {} {}", kind, column.name());
        let state = LedgerFile::new(path).charge(&label, result.epsilon_spent)?;
        let _ = writeln!(
            err,
            "budget: charged {} (remaining {})",
            result.epsilon_spent,
            state.ledger.remaining()
        );
    }
    for w in &result.warnings {
        warn(err, w);
    }
    writeln!(out, "{}", serde_json::to_string(&result)?)?;
    Ok(())
}

fn report_timestamp() -> String {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0))
        .map(|t| t.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .unwrap_or_else(crate::ledger::now_iso8601)
}

fn cmd_sweep(args: SweepArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let bounds = args.data.bounds()?;
    let seed = resolve_seed(args.data.seed)?;
    if args.iterations == 0 {
        return Err(AppError::Usage("--iterations must be at least 1".into()));
    }
    let defaults = args.eps_start == DEFAULT_EPS_START
        && args.eps_stop == DEFAULT_EPS_STOP
        && args.eps_step == DEFAULT_EPS_STEP;
    let grid = if defaults {
        default_epsilon_grid()
    } else {
        epsilon_grid(args.eps_start, args.eps_stop, args.eps_step)
            .map_err(|e| AppError::Usage(e.to_string()))?
    };

    let column = args.data.load()?;
    let query = SweepQuery {
        kind: args.data.query.into(),
        bounds,
        clamp_inputs: !args.data.no_clamp_inputs,
    };
    let cfg = SweepConfig::new(grid, args.iterations, query, seed)
        .map_err(|e| AppError::Usage(e.to_string()))?;
    let mut report = run_sweep(&column, &cfg)?;
    if args.format == ReportFormat::Json {
        report.timestamp = Some(report_timestamp());
    }
    emit_report(&report, args.format, &args.out)?;

    for w in &report.warnings {
        warn(err, w);
    }
    writeln!(
        out,
        "sweep: query={} column={} epsilons={} iterations={} -> {} ({})",
        report.query,
        report.column,
        report.records.len(),
        cfg.iterations(),
        args.out.display(),
        report.mode
    )?;
    Ok(())
}

fn cmd_levels(out: &mut dyn Write) -> Result<()> {
    for (level, eps) in LEVEL_EPSILONS {
        writeln!(out, "{:<10} {}", level.name(), eps)?;
    }
    Ok(())
}

fn cmd_budget(cmd: BudgetCommand, out: &mut dyn Write) -> Result<()> {
    let state = match cmd {
        BudgetCommand::Init { total, file } => LedgerFile::new(file).init(total)?,
        BudgetCommand::Status { file } => LedgerFile::new(file).load()?,
    };
    writeln!(out, "{}", serde_json::to_string(&state.status())?)?;
    Ok(())
}

fn error_json(e: &AppError) -> String {
    serde_json::json!({
        "error": e.kind(),
        "message": e.to_string(),
        "exit_code": e.exit_code(),
    })
    .to_string()
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let usage = AppError::Usage(e.to_string().trim_end().to_owned());
                    let _ = writeln!(err, "{}", error_json(&usage));
                    2
                }
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Levels => cmd_levels(out),
        Command::Budget(c) => cmd_budget(c, out),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "{}", error_json(&e));
            e.exit_code()
        }
    }
}
