//! The whole pipeline for one query: encode, solve, decode, re-validate.

use std::path::Path;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::encoder::{encode_network, EncodeError, EncodeOptions};
use crate::property::{encode_query, eval_state_formula, PropertyError, Query};
use crate::solver::{solve, SolverConfig, SolverError, Verdict};
use crate::ta::Network;
use crate::term::{emit_smtlib2, Script, ScriptError};
use crate::trace::{
    decode_trace, project_signal, validate_trace, DecodeError, LassoTrace, Signal, SignalError,
    TraceViolation,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// Invariant holds on every lasso run up to the bound.
    Holds,
    /// Invariant fails; the trace is a counterexample.
    Violated,
    /// Reachability target found; the trace is a witness.
    Reached,
    /// No lasso run up to the bound reaches the target.
    NotReached,
    Unknown,
    Timeout,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Holds => "holds",
            Outcome::Violated => "violated",
            Outcome::Reached => "reached",
            Outcome::NotReached => "not-reached",
            Outcome::Unknown => "unknown",
            Outcome::Timeout => "timeout",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub outcome: Outcome,
    pub k: usize,
    pub encode_time: Duration,
    pub solve_time: Duration,
    pub assertions: usize,
    /// Present for `Violated` and `Reached`.
    pub trace: Option<LassoTrace>,
    /// First position where the counterexample or witness shows.
    pub position: Option<usize>,
    pub signal: Option<Signal>,
    /// Solver explanation for `Unknown`.
    pub reason: Option<String>,
}

impl CheckReport {
    /// One-line summary that never claims more than the bound supports.
    pub fn summary(&self) -> String {
        match self.outcome {
            Outcome::Holds => format!(
                "property holds for all lasso runs up to bound k = {}",
                self.k
            ),
            Outcome::NotReached => format!(
                "target not reachable on any lasso run up to bound k = {}",
                self.k
            ),
            Outcome::Violated => format!(
                "property violated at position {} (k = {})",
                self.position.unwrap_or_default(),
                self.k
            ),
            Outcome::Reached => format!(
                "target reached at position {} (k = {})",
                self.position.unwrap_or_default(),
                self.k
            ),
            Outcome::Unknown => format!(
                "solver returned unknown: {}",
                self.reason.as_deref().unwrap_or("no reason given")
            ),
            Outcome::Timeout => "solver timed out".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error(transparent)]
    Script(#[from] ScriptError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error("decoded trace fails validation:\n{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("\n"))]
    InvalidTrace(Vec<TraceViolation>),
    #[error("decoded trace has no position showing the query's target")]
    NoWitness,
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Encoding plus the query assertion.
pub fn build_script(
    net: &Network,
    query: &Query,
    k: usize,
    options: EncodeOptions,
) -> Result<Script, CheckError> {
    let mut enc = encode_network(net, k, options)?;
    let goal = encode_query(&enc.hook, query, net)?;
    enc.script.assert(goal)?;
    Ok(enc.script)
}

/// Writes the SMT-LIB2 text for `query` to `path`.
pub fn emit_query(
    net: &Network,
    query: &Query,
    k: usize,
    options: EncodeOptions,
    logic: &str,
    path: &Path,
) -> Result<(), CheckError> {
    let script = build_script(net, query, k, options)?;
    std::fs::write(path, emit_smtlib2(&script, logic)).map_err(|source| CheckError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Runs `query` at bound `k`. A model is only reported after its trace has
/// passed `validate_trace` and a position satisfying the target was found.
pub fn check(
    net: &Network,
    query: &Query,
    k: usize,
    options: EncodeOptions,
    solver: &SolverConfig,
) -> Result<CheckReport, CheckError> {
    let started = Instant::now();
    let script = build_script(net, query, k, options)?;
    let encode_time = started.elapsed();
    let started = Instant::now();
    let verdict = solve(&script, solver)?;
    let solve_time = started.elapsed();
    let invariant = matches!(query, Query::Invariant(_));
    let mut report = CheckReport {
        outcome: Outcome::Unknown,
        k,
        encode_time,
        solve_time,
        assertions: script.assertions().len(),
        trace: None,
        position: None,
        signal: None,
        reason: None,
    };
    match verdict {
        Verdict::Unsat => {
            report.outcome = if invariant {
                Outcome::Holds
            } else {
                Outcome::NotReached
            };
        }
        Verdict::Unknown(why) => report.reason = Some(why),
        Verdict::Timeout => report.outcome = Outcome::Timeout,
        Verdict::Sat(model) => {
            let trace = decode_trace(&model, net, k)?;
            validate_trace(&trace, net).map_err(CheckError::InvalidTrace)?;
            let target = query.target();
            let mut position = None;
            for (l, cfg) in trace.configurations.iter().enumerate() {
                if eval_state_formula(cfg, net, &target)? {
                    position = Some(l);
                    break;
                }
            }
            report.position = Some(position.ok_or(CheckError::NoWitness)?);
            report.signal = Some(project_signal(&trace, net)?);
            report.trace = Some(trace);
            report.outcome = if invariant {
                Outcome::Violated
            } else {
                Outcome::Reached
            };
        }
    }
    Ok(report)
}
