//! Command-line front end.
//!
//! Exit codes: 0 property holds (or target reached), 1 property violated
//! (or target not reached), 2 error, 3 solver unknown or timeout.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{gen_fischer, gen_token_ring, FischerVariant};
use crate::check::{build_script, check, CheckReport, Outcome};
use crate::encoder::{encode_network, EdgePolicy, EncodeOptions, Liveness};
use crate::model::{parse_file, Diagnostics, Parsed};
use crate::property::{parse_query, DisplayFormula, Query};
use crate::solver::{InputMode, SolverConfig, SOLVER_ENV};
use crate::term::emit_smtlib2;
use crate::trace::{format_signal, format_table, to_json};

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;
pub const EXIT_UNKNOWN: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "tabmc",
    version,
    about = "Bounded model checker for networks of timed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a query against a model.
    Check(CheckArgs),
    /// Write the SMT-LIB2 encoding without solving.
    Encode(EncodeArgs),
    /// Print a benchmark model.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EdgesFlag {
    RightClosed,
    Free,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LivenessFlag {
    None,
    Strong,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceFormat {
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputFlag {
    Stdin,
    File,
}

#[derive(Debug, Args)]
struct EncodingArgs {
    /// Model file.
    model: PathBuf,
    /// Bound; the lasso has k + 2 positions.
    #[arg(short = 'k', long = "bound", default_value_t = 10)]
    k: usize,
    #[arg(long, value_enum, default_value = "right-closed")]
    edges: EdgesFlag,
    #[arg(long, value_enum, default_value = "strong")]
    liveness: LivenessFlag,
    /// SMT-LIB2 logic to declare.
    #[arg(long, default_value = crate::term::DEFAULT_LOGIC)]
    logic: String,
}

impl EncodingArgs {
    fn options(&self) -> EncodeOptions {
        EncodeOptions {
            edges: match self.edges {
                EdgesFlag::RightClosed => EdgePolicy::RightClosed,
                EdgesFlag::Free => EdgePolicy::Free,
            },
            liveness: match self.liveness {
                LivenessFlag::None => Liveness::None,
                LivenessFlag::Strong => Liveness::Strong,
            },
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Query, e.g. "invariant !(P1.cs && P2.cs)" or "reachable (n = 1) && A.q2".
    #[arg(long = "check")]
    query: String,
    /// Solver executable; defaults to $TABMC_SOLVER, then `z3`.
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Extra solver arguments, replacing the defaults for known solvers.
    #[arg(long = "solver-arg", allow_hyphen_values = true)]
    solver_args: Vec<String>,
    /// Solver timeout in seconds.
    #[arg(long, default_value_t = 300.0)]
    timeout: f64,
    /// Random seeds raced against each other.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    seeds: Vec<u64>,
    /// How the script reaches the solver.
    #[arg(long, value_enum, default_value = "stdin")]
    input: InputFlag,
    /// Also write the SMT-LIB2 script here.
    #[arg(long)]
    emit: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    trace_format: TraceFormat,
    /// Write the trace to this file instead of standard output.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Print the projected signal after the trace.
    #[arg(long)]
    signal: bool,
}

#[derive(Debug, Args)]
struct EncodeArgs {
    #[command(flatten)]
    encoding: EncodingArgs,
    /// Output file.
    #[arg(long)]
    emit: PathBuf,
    /// Add the assertion for this query.
    #[arg(long = "check")]
    query: Option<String>,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    model: GenModel,
    /// Number of processes or agents.
    n: usize,
    /// Fischer only: drop the `id` recheck before the critical section.
    #[arg(long)]
    broken: bool,
    /// Output file; standard output by default.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenModel {
    Fischer,
    TokenRing,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Model(Diagnostics),
    #[error("{0}")]
    Other(String),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Parsed, CliError> {
    let parsed = parse_file(path).map_err(CliError::Model)?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "{}: {w}", path.display());
    }
    Ok(parsed)
}

fn solver_config(args: &CheckArgs) -> Result<SolverConfig, CliError> {
    let mut cfg = match &args.solver {
        Some(p) => SolverConfig::new(p),
        None => SolverConfig::from_env(),
    };
    if !args.solver_args.is_empty() {
        cfg.args = Some(args.solver_args.clone());
    }
    if !(args.timeout > 0.0 && args.timeout.is_finite()) {
        return Err(other("--timeout must be positive"));
    }
    cfg.timeout = Duration::from_secs_f64(args.timeout);
    if args.seeds.is_empty() {
        return Err(other("--seeds needs at least one seed"));
    }
    cfg.seeds = args.seeds.clone();
    cfg.input = match args.input {
        InputFlag::Stdin => InputMode::Stdin,
        InputFlag::File => InputMode::TempFile,
    };
    cfg.logic = args.encoding.logic.clone();
    Ok(cfg)
}

fn report_text(report: &CheckReport) -> String {
    format!(
        "verdict: {}\n{}\nbound: {}\nassertions: {}\nencode time: {:.3}s\nsolve time: {:.3}s\n",
        report.outcome.as_str(),
        report.summary(),
        report.k,
        report.assertions,
        report.encode_time.as_secs_f64(),
        report.solve_time.as_secs_f64()
    )
}

fn run_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let parsed = load(&args.encoding.model, err)?;
    let net = &parsed.network;
    let query = parse_query(&args.query, net).map_err(other)?;
    let options = args.encoding.options();
    if let Some(path) = &args.emit {
        let script = build_script(net, &query, args.encoding.k, options).map_err(other)?;
        write_file(path, &emit_smtlib2(&script, &args.encoding.logic))?;
    }
    let cfg = solver_config(args)?;
    let report = check(net, &query, args.encoding.k, options, &cfg).map_err(other)?;
    let kind = match query {
        Query::Invariant(_) => "invariant",
        Query::Reachable(_) => "reachable",
    };
    let _ = writeln!(
        out,
        "query: {kind} {}",
        DisplayFormula(net, query.formula())
    );
    let _ = out.write_all(report_text(&report).as_bytes());
    if let Some(trace) = &report.trace {
        let text = match args.trace_format {
            TraceFormat::Table => format_table(trace, net),
            TraceFormat::Structured => {
                let mut s = serde_json::to_string_pretty(&to_json(trace, net)).map_err(other)?;
                s.push('\n');
                s
            }
        };
        match &args.trace_out {
            Some(path) => {
                write_file(path, &text)?;
                let _ = writeln!(out, "trace: {}", path.display());
            }
            None => {
                let _ = writeln!(out, "trace (loop at position {}):", trace.loop_index);
                let _ = out.write_all(text.as_bytes());
            }
        }
        if args.signal {
            if let Some(signal) = &report.signal {
                let _ = writeln!(out, "signal:");
                let _ = out.write_all(format_signal(net, signal).as_bytes());
            }
        }
    }
    Ok(match report.outcome {
        Outcome::Holds | Outcome::Reached => EXIT_HOLDS,
        Outcome::Violated | Outcome::NotReached => EXIT_VIOLATED,
        Outcome::Unknown | Outcome::Timeout => EXIT_UNKNOWN,
    })
}

fn run_encode(
    args: &EncodeArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let parsed = load(&args.encoding.model, err)?;
    let net = &parsed.network;
    let options = args.encoding.options();
    let script = match &args.query {
        Some(q) => {
            let query = parse_query(q, net).map_err(other)?;
            build_script(net, &query, args.encoding.k, options).map_err(other)?
        }
        None => {
            encode_network(net, args.encoding.k, options)
                .map_err(other)?
                .script
        }
    };
    write_file(&args.emit, &emit_smtlib2(&script, &args.encoding.logic))?;
    let _ = writeln!(
        out,
        "wrote {} ({} declarations, {} assertions)",
        args.emit.display(),
        script.declarations().count(),
        script.assertions().len()
    );
    Ok(EXIT_HOLDS)
}

fn run_gen(args: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let text = match args.model {
        GenModel::Fischer => {
            let variant = if args.broken {
                FischerVariant::NoRecheck
            } else {
                FischerVariant::Correct
            };
            gen_fischer(args.n, variant).map_err(other)?
        }
        GenModel::TokenRing => {
            if args.broken {
                return Err(other("--broken only applies to fischer"));
            }
            gen_token_ring(args.n).map_err(other)?
        }
    };
    match &args.output {
        Some(path) => write_file(path, &text)?,
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(EXIT_HOLDS)
}

/// Runs the command line `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_ERROR;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_HOLDS;
        }
    };
    let result = match &cli.command {
        Command::Check(a) => run_check(a, out, err),
        Command::Encode(a) => run_encode(a, out, err),
        Command::Gen(a) => run_gen(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if let CliError::Other(m) = &e {
                if m.contains("not found") && std::env::var_os(SOLVER_ENV).is_none() {
                    let _ = writeln!(err, "hint: pass --solver or set {SOLVER_ENV}");
                }
            }
            EXIT_ERROR
        }
    }
}
