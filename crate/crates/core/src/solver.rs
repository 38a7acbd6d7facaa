//! Running an external SMT-LIB2 solver and reading its models back.
//!
//! Several copies of the solver can race on the same script with different
//! random seeds; the first definitive answer wins and the others are killed.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::{Child, Command, ExitStatus, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::term::{emit_smtlib2, Rational, Script, Sort, Value, DEFAULT_LOGIC};

/// Environment variable overriding the solver executable.
pub const SOLVER_ENV: &str = "TABMC_SOLVER";

/// How the script reaches the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputMode {
    #[default]
    Stdin,
    /// Written to a temporary file whose path is the last argument.
    TempFile,
}

/// Solver families whose command line and seed option are known.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Z3,
    Cvc5,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub program: PathBuf,
    /// Extra arguments; when `None` the defaults for the solver kind are used.
    pub args: Option<Vec<String>>,
    pub timeout: Duration,
    pub seeds: Vec<u64>,
    pub input: InputMode,
    pub logic: String,
    /// Models are re-checked against the script when it has at most this
    /// many assertions.
    pub recheck_limit: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            program: PathBuf::from("z3"),
            args: None,
            timeout: Duration::from_secs(300),
            seeds: vec![1, 2],
            input: InputMode::Stdin,
            logic: DEFAULT_LOGIC.to_string(),
            recheck_limit: 50_000,
        }
    }
}

impl SolverConfig {
    pub fn new(program: impl Into<PathBuf>) -> Self {
        SolverConfig {
            program: program.into(),
            ..Default::default()
        }
    }

    /// Default configuration with the program taken from `TABMC_SOLVER`
    /// when set.
    pub fn from_env() -> Self {
        match std::env::var_os(SOLVER_ENV) {
            Some(p) if !p.is_empty() => SolverConfig::new(p),
            _ => SolverConfig::default(),
        }
    }

    pub fn kind(&self) -> SolverKind {
        let name = self
            .program
            .file_name()
            .map(|n| n.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if name.contains("cvc5") {
            SolverKind::Cvc5
        } else if name.contains("z3") {
            SolverKind::Z3
        } else {
            SolverKind::Unknown
        }
    }

    /// Seeds actually raced: unknown solvers get a single unseeded run.
    pub fn effective_seeds(&self) -> Vec<Option<u64>> {
        match self.kind() {
            SolverKind::Unknown => vec![None],
            _ if self.seeds.is_empty() => vec![None],
            _ => self.seeds.iter().map(|s| Some(*s)).collect(),
        }
    }

    fn base_args(&self) -> Vec<String> {
        if let Some(a) = &self.args {
            return a.clone();
        }
        match (self.kind(), self.input) {
            (SolverKind::Z3, InputMode::Stdin) => vec!["-in".into()],
            (SolverKind::Cvc5, _) => vec!["--lang=smt2".into()],
            _ => Vec::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("solver executable {0} not found")]
    NotFound(PathBuf),
    #[error("cannot run solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver failed ({status}): {message}")]
    Crash { status: String, message: String },
    #[error("unexpected solver output: {0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("solver model violates assertions {0:?}")]
    ModelRejected(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed model text: {0}")]
    Syntax(String),
    #[error("model has no value for `{0}`")]
    Missing(String),
    #[error("value of `{name}` does not fit its sort {sort}: {text}")]
    BadValue {
        name: String,
        sort: Sort,
        text: String,
    },
}

/// Values of the declared constants of a script.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SolverModel {
    values: BTreeMap<String, Value>,
}

impl SolverModel {
    pub fn get(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn insert(&mut self, name: impl Into<String>, value: Value) {
        self.values.insert(name.into(), value);
    }

    pub fn lookup(&self) -> impl Fn(&str) -> Option<Value> + '_ {
        move |n| self.values.get(n).cloned()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Sat(SolverModel),
    Unsat,
    Unknown(String),
    Timeout,
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Sat(_) => "sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown(_) => "unknown",
            Verdict::Timeout => "timeout",
        }
    }
}

// ---------------------------------------------------------------------------
// S-expressions

#[derive(Debug, Clone, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Result<Vec<String>, ModelError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            _ if c.is_whitespace() => {
                chars.next();
            }
            ';' => {
                while chars.peek().is_some_and(|c| *c != '\n') {
                    chars.next();
                }
            }
            '(' | ')' => {
                out.push(c.to_string());
                chars.next();
            }
            '|' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('|') => break,
                        Some(c) => s.push(c),
                        None => return Err(ModelError::Syntax("unterminated |symbol|".into())),
                    }
                }
                out.push(s);
            }
            '"' => {
                chars.next();
                let mut s = String::from("\"");
                loop {
                    match chars.next() {
                        Some('"') if chars.peek() == Some(&'"') => {
                            chars.next();
                            s.push('"');
                        }
                        Some('"') => break,
                        Some(c) => s.push(c),
                        None => return Err(ModelError::Syntax("unterminated string".into())),
                    }
                }
                out.push(s);
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push(s);
            }
        }
    }
    Ok(out)
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, ModelError> {
    let toks = tokenize(text)?;
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in toks {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack.pop().expect("stack never empty");
                match stack.last_mut() {
                    Some(parent) => parent.push(Sexp::List(done)),
                    None => return Err(ModelError::Syntax("unbalanced `)`".into())),
                }
            }
            _ => stack
                .last_mut()
                .expect("stack never empty")
                .push(Sexp::Atom(t)),
        }
    }
    if stack.len() != 1 {
        return Err(ModelError::Syntax("unbalanced `(`".into()));
    }
    Ok(stack.pop().expect("one level left"))
}

fn render(s: &Sexp) -> String {
    match s {
        Sexp::Atom(a) => a.clone(),
        Sexp::List(xs) => format!("({})", xs.iter().map(render).collect::<Vec<_>>().join(" ")),
    }
}

fn parse_decimal(text: &str) -> Option<Rational> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if int.is_empty()
        || !int.chars().all(|c| c.is_ascii_digit())
        || !frac.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(digits, denom))
}

fn real_value(s: &Sexp) -> Option<Rational> {
    match s {
        Sexp::Atom(a) => parse_decimal(a),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => Some(-real_value(x)?),
            [Sexp::Atom(op), a, b] if op == "/" => {
                let d = real_value(b)?;
                if d.is_zero() {
                    return None;
                }
                Some(real_value(a)? / d)
            }
            [Sexp::Atom(op), a, b] if op == "-" => Some(real_value(a)? - real_value(b)?),
            [Sexp::Atom(op), rest @ ..] if op == "+" && !rest.is_empty() => {
                rest.iter().map(real_value).sum::<Option<Rational>>()
            }
            [Sexp::Atom(op), a, b] if op == "*" => Some(real_value(a)? * real_value(b)?),
            [Sexp::Atom(op), x] if op == "to_real" => real_value(x),
            _ => None,
        },
    }
}

fn bv_value(s: &Sexp, width: u32) -> Option<BigUint> {
    let bits = match s {
        Sexp::Atom(a) if a.starts_with("#b") => {
            let digits = &a[2..];
            if digits.len() != width as usize {
                return None;
            }
            BigUint::parse_bytes(digits.as_bytes(), 2)?
        }
        Sexp::Atom(a) if a.starts_with("#x") => {
            let digits = &a[2..];
            if digits.len() * 4 != width as usize {
                return None;
            }
            BigUint::parse_bytes(digits.as_bytes(), 16)?
        }
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(u), Sexp::Atom(v), Sexp::Atom(w)] if u == "_" && v.starts_with("bv") => {
                if w.parse::<u32>().ok()? != width {
                    return None;
                }
                v[2..].parse::<BigUint>().ok()?
            }
            _ => return None,
        },
        _ => return None,
    };
    (bits < (BigUint::one() << width)).then_some(bits)
}

fn value_of(s: &Sexp, sort: Sort) -> Option<Value> {
    match sort {
        Sort::Bool => match s {
            Sexp::Atom(a) if a == "true" => Some(Value::Bool(true)),
            Sexp::Atom(a) if a == "false" => Some(Value::Bool(false)),
            _ => None,
        },
        Sort::Real => real_value(s).map(Value::Real),
        Sort::BitVec(w) => bv_value(s, w).map(|bits| Value::Bv { width: w, bits }),
    }
}

/// Reads `(get-model)` output. Every name in `declarations` must get a
/// value; names the script never declared are skipped with a warning.
pub fn parse_model(text: &str, declarations: &[(String, Sort)]) -> Result<SolverModel, ModelError> {
    parse_model_with(text, declarations, &BTreeSet::new())
}

/// Like [`parse_model`], but entries for `defined` names (macros some
/// solvers echo back) are dropped silently.
fn parse_model_with(
    text: &str,
    declarations: &[(String, Sort)],
    defined: &BTreeSet<String>,
) -> Result<SolverModel, ModelError> {
    let mut items = parse_sexps(text)?;
    // Unwrap `((define-fun ...) ...)` and `(model (define-fun ...) ...)`.
    if let [Sexp::List(inner)] = items.as_slice() {
        let mut inner = inner.clone();
        if matches!(inner.first(), Some(Sexp::Atom(a)) if a == "model") {
            inner.remove(0);
        }
        items = inner;
    }
    let sorts: BTreeMap<&str, Sort> = declarations.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let mut model = SolverModel::default();
    for item in &items {
        let Sexp::List(parts) = item else {
            return Err(ModelError::Syntax(format!("unexpected `{}`", render(item))));
        };
        match parts.as_slice() {
            [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), _sort, value]
                if kw == "define-fun" =>
            {
                let Some(sort) = sorts.get(name.as_str()) else {
                    if defined.contains(name) {
                        continue;
                    }
                    log::warn!("solver model mentions undeclared `{name}`; ignored");
                    continue;
                };
                if !args.is_empty() {
                    return Err(ModelError::Syntax(format!(
                        "`{name}` is defined as a function"
                    )));
                }
                let v = value_of(value, *sort).ok_or_else(|| ModelError::BadValue {
                    name: name.clone(),
                    sort: *sort,
                    text: render(value),
                })?;
                model.insert(name.clone(), v);
            }
            [Sexp::Atom(kw), ..] if kw == "define-fun" => {
                return Err(ModelError::Syntax(format!("malformed `{}`", render(item))));
            }
            _ => {
                log::warn!("skipping model entry `{}`", render(item));
            }
        }
    }
    for (name, _) in declarations {
        if model.get(name).is_none() {
            return Err(ModelError::Missing(name.clone()));
        }
    }
    Ok(model)
}

// ---------------------------------------------------------------------------
// Processes

fn with_seed(text: &str, seed: Option<u64>) -> String {
    let mut s = String::with_capacity(text.len() + 64);
    if let Some(seed) = seed {
        s.push_str(&format!("(set-option :random-seed {seed})\n"));
    }
    s.push_str(text);
    if !text.ends_with('\n') {
        s.push('\n');
    }
    s.push_str("(get-model)\n");
    s
}

struct RunOutput {
    stdout: String,
    stderr: String,
    status: Option<ExitStatus>,
}

struct Running {
    child: Child,
    _file: Option<tempfile::NamedTempFile>,
}

fn spawn(
    cfg: &SolverConfig,
    input: String,
    index: usize,
    tx: mpsc::Sender<(usize, RunOutput)>,
) -> Result<Running, SolverError> {
    let mut cmd = Command::new(&cfg.program);
    cmd.args(cfg.base_args());
    let mut file = None;
    match cfg.input {
        InputMode::Stdin => {
            cmd.stdin(Stdio::piped());
        }
        InputMode::TempFile => {
            let mut f = tempfile::Builder::new().suffix(".smt2").tempfile()?;
            f.write_all(input.as_bytes())?;
            f.flush()?;
            cmd.arg(f.path());
            cmd.stdin(Stdio::null());
            file = Some(f);
        }
    }
    cmd.stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = cmd.spawn().map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => SolverError::NotFound(cfg.program.clone()),
        _ => SolverError::Io(e),
    })?;
    if let Some(mut stdin) = child.stdin.take() {
        thread::spawn(move || {
            // A solver that exits early closes the pipe; nothing to report.
            let _ = stdin.write_all(input.as_bytes());
        });
    }
    let mut stdout = child.stdout.take().expect("piped stdout");
    let mut stderr = child.stderr.take().expect("piped stderr");
    thread::spawn(move || {
        let err_reader = thread::spawn(move || {
            let mut s = String::new();
            let _ = stderr.read_to_string(&mut s);
            s
        });
        let mut out = String::new();
        let _ = stdout.read_to_string(&mut out);
        let err = err_reader.join().unwrap_or_default();
        let _ = tx.send((
            index,
            RunOutput {
                stdout: out,
                stderr: err,
                status: None,
            },
        ));
    });
    Ok(Running { child, _file: file })
}

enum Answer {
    Sat(String),
    Unsat,
    Unknown(String),
    Failed(String, String),
}

fn classify(out: &RunOutput) -> Answer {
    let first = out
        .stdout
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .unwrap_or("");
    match first {
        "sat" => Answer::Sat(
            out.stdout
                .trim_start()
                .strip_prefix("sat")
                .unwrap_or("")
                .to_string(),
        ),
        "unsat" => Answer::Unsat,
        "unknown" => Answer::Unknown("solver answered unknown".into()),
        _ => {
            let status = out
                .status
                .map(|s| s.to_string())
                .unwrap_or_else(|| "no status".into());
            let mut message = first.to_string();
            if !out.stderr.trim().is_empty() {
                if !message.is_empty() {
                    message.push_str("; ");
                }
                message.push_str(out.stderr.trim());
            }
            if message.is_empty() {
                message = "no output".into();
            }
            Answer::Failed(status, message)
        }
    }
}

fn kill_all(runs: &mut [Running]) {
    for r in runs.iter_mut() {
        let _ = r.child.kill();
    }
    for r in runs.iter_mut() {
        let _ = r.child.wait();
    }
}

/// Runs one solver per seed. With `race` the first sat/unsat answer stops
/// the others; otherwise all runs complete. Returns per-run answers in
/// seed order (`None` for runs cut short) or `None` on timeout.
fn run_seeds(
    text: &str,
    cfg: &SolverConfig,
    race: bool,
) -> Result<Option<Vec<Option<Answer>>>, SolverError> {
    let seeds = cfg.effective_seeds();
    let (tx, rx) = mpsc::channel();
    let mut runs = Vec::new();
    for (i, seed) in seeds.iter().enumerate() {
        match spawn(cfg, with_seed(text, *seed), i, tx.clone()) {
            Ok(r) => runs.push(r),
            Err(e) => {
                kill_all(&mut runs);
                return Err(e);
            }
        }
    }
    drop(tx);
    let deadline = Instant::now() + cfg.timeout;
    let mut answers: Vec<Option<Answer>> = (0..runs.len()).map(|_| None).collect();
    let mut pending = runs.len();
    while pending > 0 {
        let now = Instant::now();
        if now >= deadline {
            kill_all(&mut runs);
            return Ok(None);
        }
        match rx.recv_timeout(deadline - now) {
            Ok((i, mut out)) => {
                pending -= 1;
                out.status = runs[i].child.wait().ok();
                let answer = classify(&out);
                let definitive = matches!(answer, Answer::Sat(_) | Answer::Unsat);
                answers[i] = Some(answer);
                if race && definitive {
                    break;
                }
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                kill_all(&mut runs);
                return Ok(None);
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
        }
    }
    kill_all(&mut runs);
    Ok(Some(answers))
}

fn to_verdict(
    answer: Answer,
    declarations: &[(String, Sort)],
    defined: &BTreeSet<String>,
) -> Result<Verdict, SolverError> {
    match answer {
        Answer::Sat(model) => Ok(Verdict::Sat(parse_model_with(
            &model,
            declarations,
            defined,
        )?)),
        Answer::Unsat => Ok(Verdict::Unsat),
        Answer::Unknown(why) => Ok(Verdict::Unknown(why)),
        Answer::Failed(status, message) => Err(SolverError::Crash { status, message }),
    }
}

/// Solves SMT-LIB2 text whose declarations are `declarations`. `(get-model)`
/// is appended by the driver.
pub fn solve_text(
    text: &str,
    declarations: &[(String, Sort)],
    cfg: &SolverConfig,
) -> Result<Verdict, SolverError> {
    solve_text_with(text, declarations, &BTreeSet::new(), cfg)
}

fn solve_text_with(
    text: &str,
    declarations: &[(String, Sort)],
    defined: &BTreeSet<String>,
    cfg: &SolverConfig,
) -> Result<Verdict, SolverError> {
    let Some(answers) = run_seeds(text, cfg, true)? else {
        return Ok(Verdict::Timeout);
    };
    let mut answers: Vec<Answer> = answers.into_iter().flatten().collect();
    if let Some(i) = answers
        .iter()
        .position(|a| matches!(a, Answer::Sat(_) | Answer::Unsat))
    {
        return to_verdict(answers.swap_remove(i), declarations, defined);
    }
    if let Some(i) = answers.iter().position(|a| matches!(a, Answer::Unknown(_))) {
        return to_verdict(answers.swap_remove(i), declarations, defined);
    }
    match answers.into_iter().next() {
        Some(a) => to_verdict(a, declarations, defined),
        None => Err(SolverError::Malformed(
            "no solver produced an answer".into(),
        )),
    }
}

/// Runs every seed to completion and returns each verdict, in seed order.
pub fn solve_all(
    text: &str,
    declarations: &[(String, Sort)],
    cfg: &SolverConfig,
) -> Result<Vec<Verdict>, SolverError> {
    let Some(answers) = run_seeds(text, cfg, false)? else {
        return Ok(vec![Verdict::Timeout]);
    };
    answers
        .into_iter()
        .map(|a| match a {
            Some(a) => to_verdict(a, declarations, &BTreeSet::new()),
            None => Ok(Verdict::Timeout),
        })
        .collect()
}

fn declarations_of(script: &Script) -> Vec<(String, Sort)> {
    script
        .declarations()
        .map(|(n, s)| (n.to_string(), s))
        .collect()
}

/// Emits, solves and (for small scripts) re-checks the model against every
/// assertion with the in-process evaluator.
pub fn solve(script: &Script, cfg: &SolverConfig) -> Result<Verdict, SolverError> {
    let text = emit_smtlib2(script, &cfg.logic);
    let defined = script.definitions().map(|(n, _)| n.to_string()).collect();
    let verdict = solve_text_with(&text, &declarations_of(script), &defined, cfg)?;
    if let Verdict::Sat(model) = &verdict {
        if script.assertions().len() <= cfg.recheck_limit {
            let failing = script
                .failing_assertions(&model.lookup())
                .map_err(|e| SolverError::Malformed(e.to_string()))?;
            if !failing.is_empty() {
                return Err(SolverError::ModelRejected(failing));
            }
        }
    }
    Ok(verdict)
}
