//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Duration;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use tabmc::encoder::TransitionRef;
use tabmc::model::parse_network;
use tabmc::solver::{solve_text, SolverConfig, Verdict};
use tabmc::ta::{
    check_discrete_step, check_initial, check_time_step, ChannelId, Clause, Configuration, Edge,
    LocId, Network, Rational, StepEntry, StepLabel, SyncKind, SyncLabel, Violation,
};
use tabmc::term::Sort;
use tabmc::trace::LassoTrace;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    q(n, 1)
}

// ---------------------------------------------------------------------------
// Solvers

fn probe(cfg: SolverConfig) -> Option<SolverConfig> {
    let decls = vec![("a".to_string(), Sort::Bool)];
    match solve_text(
        "(declare-const a Bool)\n(assert a)\n(check-sat)\n",
        &decls,
        &cfg,
    ) {
        Ok(Verdict::Sat(_)) => Some(cfg),
        _ => None,
    }
}

/// The primary solver (`$TABMC_SOLVER`, else `z3`), if it runs.
pub fn primary_solver() -> Option<SolverConfig> {
    let mut cfg = SolverConfig::from_env();
    cfg.timeout = Duration::from_secs(120);
    probe(cfg)
}

/// An independent second solver: `$TABMC_SOLVER2`, a `cvc5` binary, or the
/// bundled cvc5 front end.
pub fn second_solver() -> Option<SolverConfig> {
    let mut candidates: Vec<PathBuf> = Vec::new();
    if let Some(p) = std::env::var_os("TABMC_SOLVER2") {
        candidates.push(p.into());
    }
    candidates.push("cvc5".into());
    candidates.push(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scripts/cvc5-smt2"));
    for c in candidates {
        let mut cfg = SolverConfig::new(c);
        cfg.seeds = vec![1];
        cfg.timeout = Duration::from_secs(120);
        if let Some(cfg) = probe(cfg) {
            return Some(cfg);
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Random networks

/// A random model in the textual format, small enough for quick solving:
/// up to 3 automata, 4 locations each, 2 clocks and 2 variables.
pub fn random_model_text(rng: &mut ChaCha8Rng) -> String {
    let clocks: Vec<String> = (0..rng.gen_range(0..=2)).map(|i| format!("x{i}")).collect();
    let mut vars = Vec::new();
    for i in 0..rng.gen_range(0..=2) {
        let lo: i64 = rng.gen_range(-4..=1);
        let hi: i64 = rng.gen_range(lo..=lo + 6);
        let init = rng.gen_range(lo..=hi);
        vars.push((format!("v{i}"), lo, hi, init));
    }
    // (name, broadcast)
    let channels: Vec<(String, bool)> = (0..rng.gen_range(0..=2))
        .map(|i| (format!("c{i}"), rng.gen_bool(0.4)))
        .collect();

    let mut out = String::new();
    if !clocks.is_empty() {
        let _ = writeln!(out, "clock {};", clocks.join(", "));
    }
    for (n, lo, hi, init) in &vars {
        let _ = writeln!(out, "var {n} : [{lo}, {hi}] = {init};");
    }
    if !channels.is_empty() {
        let names: Vec<&str> = channels.iter().map(|c| c.0.as_str()).collect();
        let _ = writeln!(out, "channel {};", names.join(", "));
    }
    let width = |lo: i64, hi: i64| tabmc::ta::signed_width_for_range(lo, hi);
    for a in 0..rng.gen_range(1..=3) {
        let _ = writeln!(out, "automaton A{a} {{");
        let nloc = rng.gen_range(1..=4);
        for l in 0..nloc {
            let mut line = format!("  location l{l}");
            if !clocks.is_empty() && rng.gen_bool(0.3) {
                let x = clocks.choose(rng).unwrap();
                let rel = if rng.gen_bool(0.5) { "<" } else { "<=" };
                let _ = write!(line, " inv {x} {rel} {}", rng.gen_range(1..=4));
            }
            if rng.gen_bool(0.3) {
                let _ = write!(line, " labels {{p{a}_{l}}}");
            }
            let _ = writeln!(out, "{line};");
        }
        for t in 0..rng.gen_range(0..=4) {
            let mut line = format!(
                "  trans t{t}: l{} -> l{}",
                rng.gen_range(0..nloc),
                rng.gen_range(0..nloc)
            );
            let mut guards = Vec::new();
            if !clocks.is_empty() && rng.gen_bool(0.4) {
                let x = clocks.choose(rng).unwrap();
                let rel = ["<", "<=", ">", ">="].choose(rng).unwrap();
                guards.push(format!("{x} {rel} {}", rng.gen_range(0..=4)));
            }
            if !vars.is_empty() && rng.gen_bool(0.4) {
                let (n, lo, hi, _) = vars.choose(rng).unwrap();
                let rel = ["=", "!=", "<", "<=", ">", ">="].choose(rng).unwrap();
                let rhs = if vars.len() > 1 && rng.gen_bool(0.3) {
                    vars.choose(rng).unwrap().0.clone()
                } else {
                    rng.gen_range(*lo..=*hi).to_string()
                };
                guards.push(format!("{n} {rel} {rhs}"));
            }
            if !guards.is_empty() {
                let _ = write!(line, " when {}", guards.join(" and "));
            }
            if !channels.is_empty() && rng.gen_bool(0.4) {
                let (c, broadcast) = channels.choose(rng).unwrap();
                let kind = match (broadcast, rng.gen_bool(0.5)) {
                    (false, true) => '!',
                    (false, false) => '?',
                    (true, true) => '#',
                    (true, false) => '@',
                };
                let _ = write!(line, " sync {c}{kind}");
            }
            let resets: Vec<&String> = clocks.iter().filter(|_| rng.gen_bool(0.3)).collect();
            if !resets.is_empty() {
                let names: Vec<&str> = resets.iter().map(|s| s.as_str()).collect();
                let _ = write!(line, " reset {{{}}}", names.join(", "));
            }
            let mut asg = Vec::new();
            for (n, lo, hi, _) in &vars {
                if !rng.gen_bool(0.3) {
                    continue;
                }
                let readable: Vec<&String> = vars
                    .iter()
                    .filter(|(_, l2, h2, _)| width(*l2, *h2) <= width(*lo, *hi))
                    .map(|v| &v.0)
                    .collect();
                let e = match rng.gen_range(0..3) {
                    0 => rng.gen_range(*lo..=*hi).to_string(),
                    1 => format!("{} + 1", readable.choose(rng).unwrap()),
                    _ => format!("{} - 1", readable.choose(rng).unwrap()),
                };
                asg.push(format!("{n} := {e}"));
            }
            if !asg.is_empty() {
                let _ = write!(line, " do {{{}}}", asg.join(", "));
            }
            let _ = writeln!(out, "{line};");
        }
        out.push_str("}\n");
    }
    out
}

/// A random network that parses, with its text.
pub fn random_network(rng: &mut ChaCha8Rng) -> (String, Network) {
    for _ in 0..100 {
        let text = random_model_text(rng);
        if let Ok(p) = parse_network(&text) {
            return (text, p.network);
        }
    }
    panic!("random model generator keeps producing rejected models");
}

/// A random `reachable` query about one location or one variable value.
pub fn random_reach_query(rng: &mut ChaCha8Rng, net: &Network) -> String {
    if !net.vars.is_empty() && rng.gen_bool(0.3) {
        let v = net.vars.choose(rng).unwrap();
        return format!("reachable {} = {}", v.name, rng.gen_range(v.lo..=v.hi));
    }
    let a = net.automata.choose(rng).unwrap();
    let l = a.locations.choose(rng).unwrap();
    format!("reachable {}.{}", a.name, l.name)
}

// ---------------------------------------------------------------------------
// Semantics cases

/// Two automata over clocks `x`, `y`, variables `n`, `m` and channels
/// `c` (binary) and `b` (broadcast).
pub const SEMANTICS_NET: &str = "
clock x, y;
var n : [0, 3] = 0;
var m : [0, 3] = 0;
channel c, b;

automaton A {
  init a0;
  location a0 inv x <= 5;
  location a1 inv x < 2;
  location a2 inv x < 2;
  trans go: a0 -> a1 when x > 1 and n = 0 reset {x} do {n := n + 1};
  trans late: a0 -> a2;
  trans send: a0 -> a0 sync c!;
  trans shout: a1 -> a0 sync b#;
  trans inc: a1 -> a1 do {n := n + 3};
}

automaton B {
  init b0;
  location b0 inv y <= 3;
  location b1;
  trans recv: b0 -> b1 sync c?;
  trans hear: b0 -> b0 when y > 1 sync b@;
  trans w: b0 -> b1 do {n := 1};
}
";

pub fn semantics_net() -> Network {
    parse_network(SEMANTICS_NET)
        .expect("semantics network parses")
        .network
}

/// `(a, b, x, y, n, m)`.
pub fn sc(a: usize, b: usize, x: Rational, y: Rational, n: i64, m: i64) -> Configuration {
    Configuration {
        locations: vec![LocId(a), LocId(b)],
        vars: vec![n, m],
        clocks: vec![x, y],
    }
}

pub fn fire(edge: Edge) -> StepEntry {
    StepEntry::Fire {
        sync: SyncLabel::Tau,
        edge,
    }
}

pub fn fire_on(channel: usize, kind: SyncKind, edge: Edge) -> StepEntry {
    StepEntry::Fire {
        sync: SyncLabel::on(ChannelId(channel), kind),
        edge,
    }
}

pub struct SemCase {
    pub name: &'static str,
    pub outcome: Result<(), Vec<Violation>>,
    /// `None` means the step must be accepted.
    pub expect: Option<Clause>,
}

impl SemCase {
    pub fn passes(&self) -> bool {
        match (&self.outcome, self.expect) {
            (Ok(()), None) => true,
            (Err(v), Some(c)) => v.iter().any(|v| v.clause == c),
            _ => false,
        }
    }
}

/// Time-step and discrete-step cases on [`SEMANTICS_NET`], each with the
/// clause it must trip (or none).
pub fn semantics_cases() -> Vec<SemCase> {
    use Edge::{LeftClosed as LC, RightClosed as RC};
    use StepEntry::Idle;
    let net = semantics_net();
    let time =
        |from: Configuration, d: Rational, to: Configuration| check_time_step(&net, &from, &d, &to);
    let step = |from: Configuration, label: Vec<StepEntry>, to: Configuration| {
        check_discrete_step(&net, &from, &StepLabel(label), &to).map(|_| ())
    };
    let h = || q(3, 2);
    let mut cases = Vec::new();
    let mut case = |name, outcome, expect| {
        cases.push(SemCase {
            name,
            outcome,
            expect,
        })
    };

    case(
        "delay advances every clock",
        time(
            sc(0, 0, int(0), int(0), 0, 0),
            int(1),
            sc(0, 0, int(1), int(1), 0, 0),
        ),
        None,
    );
    case(
        "zero delay",
        time(
            sc(0, 0, int(0), int(0), 0, 0),
            int(0),
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::NonPositiveDelay),
    );
    case(
        "negative delay",
        time(
            sc(0, 0, int(1), int(1), 0, 0),
            int(-1),
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::NonPositiveDelay),
    );
    case(
        "delay moves a location",
        time(
            sc(0, 0, int(0), int(0), 0, 0),
            int(1),
            sc(1, 0, int(1), int(1), 0, 0),
        ),
        Some(Clause::TimeDiscrete),
    );
    case(
        "delay writes a variable",
        time(
            sc(0, 0, int(0), int(0), 0, 0),
            int(1),
            sc(0, 0, int(1), int(1), 1, 0),
        ),
        Some(Clause::TimeDiscrete),
    );
    case(
        "delay skews a clock",
        time(
            sc(0, 0, int(0), int(0), 0, 0),
            int(1),
            sc(0, 0, int(1), q(1, 2), 0, 0),
        ),
        Some(Clause::TimeClocks),
    );
    case(
        "delay up to a strict invariant bound",
        time(
            sc(1, 0, int(1), int(0), 0, 0),
            int(1),
            sc(1, 0, int(2), int(1), 0, 0),
        ),
        None,
    );
    case(
        "delay past an invariant",
        time(
            sc(1, 0, int(1), int(0), 0, 0),
            int(2),
            sc(1, 0, int(3), int(2), 0, 0),
        ),
        Some(Clause::TimeInvariant),
    );

    case(
        "right-closed firing with reset and update",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), h(), 1, 0),
        ),
        None,
    );
    case(
        "left-closed firing with reset and update",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(LC), Idle],
            sc(1, 0, int(0), h(), 1, 0),
        ),
        None,
    );
    case(
        "clock guard fails",
        step(
            sc(0, 0, q(1, 2), q(1, 2), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), q(1, 2), 1, 0),
        ),
        Some(Clause::Guard),
    );
    case(
        "clock guard fails at its bound",
        step(
            sc(0, 0, int(1), int(1), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), int(1), 1, 0),
        ),
        Some(Clause::Guard),
    );
    case(
        "variable guard fails",
        step(
            sc(0, 0, h(), h(), 1, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), h(), 2, 0),
        ),
        Some(Clause::Guard),
    );
    case(
        "reset not applied",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, h(), h(), 1, 0),
        ),
        Some(Clause::Reset),
    );
    case(
        "wrong assigned value",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), h(), 2, 0),
        ),
        Some(Clause::Assignment),
    );
    case(
        "assignment leaves the range",
        step(
            sc(1, 0, int(0), int(0), 1, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), int(0), 4, 0),
        ),
        Some(Clause::Range),
    );
    case(
        "unreset clock changes",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), int(0), 1, 0),
        ),
        Some(Clause::Frame),
    );
    case(
        "unwritten variable changes",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), h(), 1, 2),
        ),
        Some(Clause::Frame),
    );
    case(
        "idle automaton moves",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 1, int(0), h(), 1, 0),
        ),
        Some(Clause::IdleLocation),
    );
    case(
        "idle automaton outside its invariant",
        step(
            sc(0, 0, h(), int(4), 0, 0),
            vec![fire(RC), Idle],
            sc(1, 0, int(0), int(4), 1, 0),
        ),
        Some(Clause::IdleInvariant),
    );
    case(
        "right-closed exit at a strict source bound",
        step(
            sc(1, 0, int(2), q(1, 2), 0, 0),
            vec![fire_on(1, SyncKind::BroadcastSend, RC), Idle],
            sc(0, 0, int(2), q(1, 2), 0, 0),
        ),
        Some(Clause::InvariantRightClosed),
    );
    case(
        "left-closed exit at a strict source bound",
        step(
            sc(1, 0, int(2), q(1, 2), 0, 0),
            vec![fire_on(1, SyncKind::BroadcastSend, LC), Idle],
            sc(0, 0, int(2), q(1, 2), 0, 0),
        ),
        None,
    );
    case(
        "left-closed entry at a strict target bound",
        step(
            sc(0, 0, int(2), int(2), 0, 0),
            vec![fire(LC), Idle],
            sc(2, 0, int(2), int(2), 0, 0),
        ),
        Some(Clause::InvariantLeftClosed),
    );
    case(
        "right-closed entry at a strict target bound",
        step(
            sc(0, 0, int(2), int(2), 0, 0),
            vec![fire(RC), Idle],
            sc(2, 0, int(2), int(2), 0, 0),
        ),
        None,
    );
    case(
        "no such transition",
        step(
            sc(1, 0, int(0), int(0), 0, 0),
            vec![fire(RC), Idle],
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::NoTransition),
    );
    case(
        "every automaton idle",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![Idle, Idle],
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::DegenerateStep),
    );
    case(
        "label of the wrong length",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![Idle],
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::Malformed),
    );
    case(
        "lone binary sender",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![fire_on(0, SyncKind::Send, RC), Idle],
            sc(0, 0, int(0), int(0), 0, 0),
        ),
        Some(Clause::Sync),
    );
    case(
        "binary handshake",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![
                fire_on(0, SyncKind::Send, RC),
                fire_on(0, SyncKind::Receive, RC),
            ],
            sc(0, 1, int(0), int(0), 0, 0),
        ),
        None,
    );
    case(
        "lone binary receiver",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![Idle, fire_on(0, SyncKind::Receive, RC)],
            sc(0, 1, int(0), int(0), 0, 0),
        ),
        Some(Clause::Sync),
    );
    case(
        "able broadcast receiver stays idle",
        step(
            sc(1, 0, int(1), int(2), 0, 0),
            vec![fire_on(1, SyncKind::BroadcastSend, RC), Idle],
            sc(0, 0, int(1), int(2), 0, 0),
        ),
        Some(Clause::Sync),
    );
    case(
        "able broadcast receiver joins",
        step(
            sc(1, 0, int(1), int(2), 0, 0),
            vec![
                fire_on(1, SyncKind::BroadcastSend, RC),
                fire_on(1, SyncKind::BroadcastReceive, RC),
            ],
            sc(0, 0, int(1), int(2), 0, 0),
        ),
        None,
    );
    case(
        "broadcast with no able receiver",
        step(
            sc(1, 0, int(1), q(1, 2), 0, 0),
            vec![fire_on(1, SyncKind::BroadcastSend, RC), Idle],
            sc(0, 0, int(1), q(1, 2), 0, 0),
        ),
        None,
    );
    case(
        "broadcast receiver without a sender",
        step(
            sc(0, 0, int(0), int(2), 0, 0),
            vec![Idle, fire_on(1, SyncKind::BroadcastReceive, RC)],
            sc(0, 0, int(0), int(2), 0, 0),
        ),
        Some(Clause::Sync),
    );
    case(
        "shared writers disagree on the edge",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(RC), fire(LC)],
            sc(1, 1, int(0), h(), 1, 0),
        ),
        Some(Clause::EdgeConsistency),
    );
    case(
        "shared writers agree on the edge",
        step(
            sc(0, 0, h(), h(), 0, 0),
            vec![fire(LC), fire(LC)],
            sc(1, 1, int(0), h(), 1, 0),
        ),
        None,
    );
    case(
        "handshake partners disagree on the edge",
        step(
            sc(0, 0, int(0), int(0), 0, 0),
            vec![
                fire_on(0, SyncKind::Send, RC),
                fire_on(0, SyncKind::Receive, LC),
            ],
            sc(0, 1, int(0), int(0), 0, 0),
        ),
        Some(Clause::EdgeConsistency),
    );
    case(
        "initial configuration",
        check_initial(&net, &sc(0, 0, int(0), int(0), 0, 0)),
        None,
    );
    case(
        "initial clock not zero",
        check_initial(&net, &sc(0, 0, int(1), int(0), 0, 0)),
        Some(Clause::Initial),
    );
    case(
        "initial variable wrong",
        check_initial(&net, &sc(0, 0, int(0), int(0), 0, 3)),
        Some(Clause::Initial),
    );
    cases
}

// ---------------------------------------------------------------------------
// Synchronization micro-models

pub struct SyncCase {
    pub name: &'static str,
    pub model: &'static str,
    pub query: &'static str,
    /// Whether the query's target must be reachable.
    pub reachable: bool,
}

pub fn sync_cases() -> Vec<SyncCase> {
    vec![
        SyncCase {
            name: "lone c! sender cannot fire",
            model: "channel c;
                automaton A { location a; location d; trans s: a -> d sync c!; }
                automaton B { location q; }",
            query: "reachable A.d",
            reachable: false,
        },
        SyncCase {
            name: "c! with a c? partner fires",
            model: "channel c;
                automaton A { location a; location d; trans s: a -> d sync c!; }
                automaton B { location q; location r; trans h: q -> r sync c?; }",
            query: "reachable A.d && B.r",
            reachable: true,
        },
        SyncCase {
            name: "c# with zero able receivers fires",
            model: "channel c; var n : [0, 1] = 0;
                automaton A { location a; location d; trans s: a -> d sync c#; }
                automaton B { location q; location r; trans h: q -> r when n = 1 sync c@; }",
            query: "reachable A.d",
            reachable: true,
        },
        SyncCase {
            name: "c# with no receiver automaton fires",
            model: "channel c;
                automaton A { location a; location d; trans s: a -> d sync c#; }",
            query: "reachable A.d",
            reachable: true,
        },
        SyncCase {
            name: "able c@ receiver cannot stay idle",
            model: "channel c;
                automaton A { location a; location d; trans s: a -> d sync c#; }
                automaton B { location q; location r; trans h: q -> r sync c@; }",
            query: "reachable A.d && B.q",
            reachable: false,
        },
        SyncCase {
            name: "able c@ receiver follows the broadcast",
            model: "channel c;
                automaton A { location a; location d; trans s: a -> d sync c#; }
                automaton B { location q; location r; trans h: q -> r sync c@; }",
            query: "reachable A.d && B.r",
            reachable: true,
        },
    ]
}

// ---------------------------------------------------------------------------
// Hand-built lasso on the three-location automaton

pub const THREE_LOC: &str = "
clock x;
var n : [0, 1] = 0;

automaton A {
  init q0;
  location q0 labels {at_q0};
  location q1 labels {at_q1};
  location q2 inv x < 2 labels {at_q2};
  trans t1: q0 -> q2 when n = 0;
  trans t2: q0 -> q1 when x > 5 reset {x};
  trans t3: q1 -> q0 do {n := 0};
  trans t4: q2 -> q0 do {n := n + 1};
}
";

/// Idle, `t1` right-closed at 3/2, `t4` left-closed at 2 (where `x < 2`
/// only holds weakly), `t2` right-closed at 6, then `t3` back to `q0`,
/// looping from position 4.
pub fn three_loc_lasso() -> LassoTrace {
    use TransitionRef::{Declared, Null};
    let (rc, lc) = (Edge::RightClosed, Edge::LeftClosed);
    let steps = [
        (Null(LocId(0)), rc, int(1)),
        (Declared(0), rc, q(1, 2)),
        (Declared(3), lc, q(1, 2)),
        (Declared(1), rc, int(4)),
        (Declared(2), rc, int(1)),
        (Declared(0), rc, q(1, 2)),
        (Declared(3), lc, q(1, 2)),
        (Declared(1), rc, int(4)),
    ];
    let c = |loc: usize, n: i64, x: Rational| Configuration {
        locations: vec![LocId(loc)],
        vars: vec![n],
        clocks: vec![x],
    };
    LassoTrace {
        k: 7,
        loop_index: 4,
        configurations: vec![
            c(0, 0, int(0)),
            c(0, 0, int(1)),
            c(2, 0, q(3, 2)),
            c(0, 1, int(2)),
            c(1, 1, int(0)),
            c(0, 0, int(1)),
            c(2, 0, q(3, 2)),
            c(0, 1, int(2)),
            c(1, 1, int(0)),
        ],
        delays: steps.iter().map(|s| s.2.clone()).collect(),
        transitions: steps.iter().map(|s| vec![s.0]).collect(),
        edges: steps.iter().map(|s| vec![s.1]).collect(),
    }
}
