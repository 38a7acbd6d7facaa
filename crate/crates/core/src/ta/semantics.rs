//! Executable semantics of networks of timed automata.
//!
//! Discrete steps carry a per-automaton label of `_` (idle) or an action
//! with an interval edge. The edge decides which side of the firing instant
//! gets strict invariant satisfaction and which side only weak satisfaction.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{
    ClockConstraint, ClockRel, Configuration, Edge, Expr, Network, Rational, StepEntry, StepLabel,
    SyncKind, SyncLabel, Transition, VarConstraint, VarOperand, VarRel,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unknown clock #{0}")]
    UnknownClock(usize),
    #[error("unknown variable #{0}")]
    UnknownVar(usize),
    #[error("unknown automaton #{0}")]
    UnknownAutomaton(usize),
    #[error("unknown transition #{1} of automaton #{0}")]
    UnknownTransition(usize, usize),
    #[error("integer overflow while evaluating an expression")]
    Overflow,
}

/// Strict satisfaction `|=` or weak satisfaction `|=w`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SatMode {
    Strict,
    Weak,
}

/// The sub-condition of a step that a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Clause {
    /// The label or configurations do not match the network's shape.
    Malformed,
    /// A discrete step in which every automaton is idle.
    DegenerateStep,
    /// No transition of the automaton matches the action, source and target.
    NoTransition,
    /// Clock or variable guard fails before the step.
    Guard,
    /// A reset clock is not zero after the step.
    Reset,
    /// An assigned variable does not hold the expression's pre-state value.
    Assignment,
    /// An assigned value leaves the variable's declared range.
    Range,
    /// `)[` firing: source invariant weakly, destination invariant strictly.
    InvariantLeftClosed,
    /// `](` firing: source invariant strictly, destination invariant weakly.
    InvariantRightClosed,
    /// An idle automaton changed location.
    IdleLocation,
    /// An idle automaton's invariant fails before or after the step.
    IdleInvariant,
    /// A clock or variable nobody writes changed value.
    Frame,
    /// Synchronization rules for `!`/`?` or `#`/`@` broken.
    Sync,
    /// Transitions that must agree on their edge do not.
    EdgeConsistency,
    /// Delay is not strictly positive.
    NonPositiveDelay,
    /// A time step changed locations or variables.
    TimeDiscrete,
    /// A time step did not advance every clock by exactly the delay.
    TimeClocks,
    /// An invariant is not weakly satisfied after the delay.
    TimeInvariant,
    /// The first configuration is not the network's initial one.
    Initial,
    /// The last configuration of a lasso differs from the one at its loop.
    LoopWrap,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Malformed => "malformed",
            Clause::DegenerateStep => "degenerate-step",
            Clause::NoTransition => "no-transition",
            Clause::Guard => "guard",
            Clause::Reset => "reset",
            Clause::Assignment => "assignment",
            Clause::Range => "range",
            Clause::InvariantLeftClosed => "invariant-left-closed",
            Clause::InvariantRightClosed => "invariant-right-closed",
            Clause::IdleLocation => "idle-location",
            Clause::IdleInvariant => "idle-invariant",
            Clause::Frame => "frame",
            Clause::Sync => "sync",
            Clause::EdgeConsistency => "edge-consistency",
            Clause::NonPositiveDelay => "non-positive-delay",
            Clause::TimeDiscrete => "time-discrete",
            Clause::TimeClocks => "time-clocks",
            Clause::TimeInvariant => "time-invariant",
            Clause::Initial => "initial",
            Clause::LoopWrap => "loop-wrap",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub automaton: Option<usize>,
    pub detail: String,
}

impl Violation {
    fn new(clause: Clause, automaton: Option<usize>, detail: impl Into<String>) -> Self {
        Violation {
            clause,
            automaton,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.automaton {
            Some(i) => write!(f, "[{}] automaton #{}: {}", self.clause, i, self.detail),
            None => write!(f, "[{}] {}", self.clause, self.detail),
        }
    }
}

fn atom_holds(value: &Rational, rel: ClockRel, bound: u64, mode: SatMode) -> bool {
    let c = Rational::from_integer(bound.into());
    let strict = match rel {
        ClockRel::Lt => *value < c,
        ClockRel::Gt => *value > c,
        ClockRel::Le => *value <= c,
        ClockRel::Ge => *value >= c,
    };
    strict || (mode == SatMode::Weak && *value == c)
}

/// Evaluates a clock constraint under `|=` or `|=w`.
pub fn eval_clock_constraint(
    clocks: &[Rational],
    constraint: &ClockConstraint,
    mode: SatMode,
) -> Result<bool, SemanticsError> {
    let mut ok = true;
    for atom in &constraint.atoms {
        let v = clocks
            .get(atom.clock.0)
            .ok_or(SemanticsError::UnknownClock(atom.clock.0))?;
        ok &= atom_holds(v, atom.rel, atom.bound, mode);
    }
    Ok(ok)
}

fn var_value(vars: &[i64], id: usize) -> Result<i64, SemanticsError> {
    vars.get(id).copied().ok_or(SemanticsError::UnknownVar(id))
}

pub fn eval_var_constraint(
    vars: &[i64],
    constraint: &VarConstraint,
) -> Result<bool, SemanticsError> {
    Ok(match constraint {
        VarConstraint::True => true,
        VarConstraint::Atom { lhs, rel, rhs } => {
            let a = var_value(vars, lhs.0)?;
            let b = match rhs {
                VarOperand::Var(v) => var_value(vars, v.0)?,
                VarOperand::Const(c) => *c,
            };
            match rel {
                VarRel::Lt => a < b,
                VarRel::Eq => a == b,
            }
        }
        VarConstraint::Not(g) => !eval_var_constraint(vars, g)?,
        VarConstraint::And(a, b) => eval_var_constraint(vars, a)? && eval_var_constraint(vars, b)?,
    })
}

/// Integer value of an expression. No truncation to any declared range.
pub fn eval_expr(vars: &[i64], expr: &Expr) -> Result<i64, SemanticsError> {
    match expr {
        Expr::Const(c) => Ok(*c),
        Expr::Var(v) => var_value(vars, v.0),
        Expr::Add(a, b) => eval_expr(vars, a)?
            .checked_add(eval_expr(vars, b)?)
            .ok_or(SemanticsError::Overflow),
        Expr::Sub(a, b) => eval_expr(vars, a)?
            .checked_sub(eval_expr(vars, b)?)
            .ok_or(SemanticsError::Overflow),
    }
}

fn lookup_transition(
    net: &Network,
    automaton: usize,
    transition: usize,
) -> Result<&Transition, SemanticsError> {
    let a = net
        .automata
        .get(automaton)
        .ok_or(SemanticsError::UnknownAutomaton(automaton))?;
    a.transitions
        .get(transition)
        .ok_or(SemanticsError::UnknownTransition(automaton, transition))
}

/// Whether transition `transition` of automaton `automaton` may fire in `cfg`:
/// the automaton sits in its source and both guards hold strictly.
pub fn transition_enabled(
    net: &Network,
    cfg: &Configuration,
    automaton: usize,
    transition: usize,
) -> Result<bool, SemanticsError> {
    let t = lookup_transition(net, automaton, transition)?;
    let here = cfg
        .locations
        .get(automaton)
        .ok_or(SemanticsError::UnknownAutomaton(automaton))?;
    Ok(*here == t.source
        && eval_clock_constraint(&cfg.clocks, &t.clock_guard, SatMode::Strict)?
        && eval_var_constraint(&cfg.vars, &t.var_guard)?)
}

fn shape_violations(net: &Network, cfg: &Configuration, what: &str) -> Vec<Violation> {
    let mut out = Vec::new();
    if cfg.locations.len() != net.automata.len() {
        out.push(Violation::new(
            Clause::Malformed,
            None,
            format!(
                "{what}: {} locations for {} automata",
                cfg.locations.len(),
                net.automata.len()
            ),
        ));
    } else {
        for (i, (loc, a)) in cfg.locations.iter().zip(&net.automata).enumerate() {
            if loc.0 >= a.locations.len() {
                out.push(Violation::new(
                    Clause::Malformed,
                    Some(i),
                    format!("{what}: location #{} does not exist", loc.0),
                ));
            }
        }
    }
    if cfg.vars.len() != net.vars.len() {
        out.push(Violation::new(
            Clause::Malformed,
            None,
            format!(
                "{what}: {} variable values for {} variables",
                cfg.vars.len(),
                net.vars.len()
            ),
        ));
    }
    if cfg.clocks.len() != net.clocks.len() {
        out.push(Violation::new(
            Clause::Malformed,
            None,
            format!(
                "{what}: {} clock values for {} clocks",
                cfg.clocks.len(),
                net.clocks.len()
            ),
        ));
    } else if let Some(x) = cfg.clocks.iter().position(|c| c.is_negative()) {
        out.push(Violation::new(
            Clause::Malformed,
            None,
            format!("{what}: clock {} is negative", net.clocks[x]),
        ));
    }
    out
}

fn invariant_holds(net: &Network, cfg: &Configuration, automaton: usize, mode: SatMode) -> bool {
    let loc = cfg.locations[automaton];
    let inv = &net.automata[automaton].locations[loc.0].invariant;
    eval_clock_constraint(&cfg.clocks, inv, mode).unwrap_or(false)
}

/// Checks that `cfg` is a legal first configuration of a trace.
pub fn check_initial(net: &Network, cfg: &Configuration) -> Result<(), Vec<Violation>> {
    let mut out = shape_violations(net, cfg, "initial");
    if !out.is_empty() {
        return Err(out);
    }
    let init = net.initial_configuration();
    for (i, loc) in cfg.locations.iter().enumerate() {
        if loc.0 != 0 {
            out.push(Violation::new(
                Clause::Initial,
                Some(i),
                "not in the initial location",
            ));
        }
    }
    for (x, v) in cfg.clocks.iter().enumerate() {
        if !v.is_zero() {
            out.push(Violation::new(
                Clause::Initial,
                None,
                format!("clock {} starts at {} instead of 0", net.clocks[x], v),
            ));
        }
    }
    for (n, v) in cfg.vars.iter().enumerate() {
        if *v != init.vars[n] {
            out.push(Violation::new(
                Clause::Initial,
                None,
                format!(
                    "variable {} starts at {} instead of {}",
                    net.vars[n].name, v, init.vars[n]
                ),
            ));
        }
    }
    if out.is_empty() {
        for i in 0..net.automata.len() {
            if !invariant_holds(net, cfg, i, SatMode::Strict) {
                out.push(Violation::new(
                    Clause::Initial,
                    Some(i),
                    "initial invariant fails",
                ));
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Checks a time step `cfg --delta--> next`.
pub fn check_time_step(
    net: &Network,
    cfg: &Configuration,
    delta: &Rational,
    next: &Configuration,
) -> Result<(), Vec<Violation>> {
    let mut out = shape_violations(net, cfg, "source");
    out.extend(shape_violations(net, next, "target"));
    if !out.is_empty() {
        return Err(out);
    }
    if !delta.is_positive() {
        out.push(Violation::new(
            Clause::NonPositiveDelay,
            None,
            format!("delay {delta} is not positive"),
        ));
    }
    if cfg.locations != next.locations {
        out.push(Violation::new(
            Clause::TimeDiscrete,
            None,
            "locations changed during a delay",
        ));
    }
    if cfg.vars != next.vars {
        out.push(Violation::new(
            Clause::TimeDiscrete,
            None,
            "variables changed during a delay",
        ));
    }
    for (x, (before, after)) in cfg.clocks.iter().zip(&next.clocks).enumerate() {
        if &(before + delta) != after {
            out.push(Violation::new(
                Clause::TimeClocks,
                None,
                format!(
                    "clock {}: {} + {} != {}",
                    net.clocks[x], before, delta, after
                ),
            ));
        }
    }
    if cfg.locations == next.locations {
        for i in 0..net.automata.len() {
            if !invariant_holds(net, next, i, SatMode::Weak) {
                let a = &net.automata[i];
                out.push(Violation::new(
                    Clause::TimeInvariant,
                    Some(i),
                    format!(
                        "invariant of {}.{} not weakly satisfied after the delay",
                        a.name, a.locations[next.locations[i].0].name
                    ),
                ));
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Per-automaton clauses for firing `t` with edge `edge`.
fn local_violations(
    net: &Network,
    cfg: &Configuration,
    next: &Configuration,
    automaton: usize,
    t: &Transition,
    edge: Edge,
) -> Vec<Violation> {
    let i = Some(automaton);
    let mut out = Vec::new();
    let clock_ok =
        eval_clock_constraint(&cfg.clocks, &t.clock_guard, SatMode::Strict).unwrap_or(false);
    let var_ok = eval_var_constraint(&cfg.vars, &t.var_guard).unwrap_or(false);
    if !clock_ok || !var_ok {
        out.push(Violation::new(
            Clause::Guard,
            i,
            format!("guard of {} fails", t.name),
        ));
    }
    for x in &t.resets {
        if next.clocks.get(x.0).is_none_or(|v| !v.is_zero()) {
            out.push(Violation::new(
                Clause::Reset,
                i,
                format!(
                    "{} resets {} but it is not 0 afterwards",
                    t.name, net.clocks[x.0]
                ),
            ));
        }
    }
    for asg in &t.assignments {
        let decl = &net.vars[asg.target.0];
        match eval_expr(&cfg.vars, &asg.expr) {
            Ok(value) => {
                if !decl.contains(value) {
                    out.push(Violation::new(
                        Clause::Range,
                        i,
                        format!(
                            "{} assigns {} := {} outside [{}, {}]",
                            t.name, decl.name, value, decl.lo, decl.hi
                        ),
                    ));
                }
                if next.vars[asg.target.0] != value {
                    out.push(Violation::new(
                        Clause::Assignment,
                        i,
                        format!(
                            "{} assigns {} := {} but the next value is {}",
                            t.name, decl.name, value, next.vars[asg.target.0]
                        ),
                    ));
                }
            }
            Err(e) => out.push(Violation::new(
                Clause::Assignment,
                i,
                format!("{}: {e}", t.name),
            )),
        }
    }
    let src_inv = &net.automata[automaton].locations[t.source.0].invariant;
    let dst_inv = &net.automata[automaton].locations[t.target.0].invariant;
    let (src_mode, dst_mode, clause) = match edge {
        Edge::LeftClosed => (SatMode::Weak, SatMode::Strict, Clause::InvariantLeftClosed),
        Edge::RightClosed => (SatMode::Strict, SatMode::Weak, Clause::InvariantRightClosed),
    };
    if !eval_clock_constraint(&cfg.clocks, src_inv, src_mode).unwrap_or(false) {
        out.push(Violation::new(
            clause,
            i,
            format!("source invariant of {} fails at the firing instant", t.name),
        ));
    }
    if !eval_clock_constraint(&next.clocks, dst_inv, dst_mode).unwrap_or(false) {
        out.push(Violation::new(
            clause,
            i,
            format!("destination invariant of {} fails after firing", t.name),
        ));
    }
    out
}

/// Network-wide clauses for a chosen transition per firing automaton.
fn global_violations(
    net: &Network,
    cfg: &Configuration,
    label: &StepLabel,
    next: &Configuration,
    selection: &[Option<usize>],
) -> Vec<Violation> {
    let mut out = Vec::new();
    let chosen: Vec<(usize, &Transition, Edge)> = selection
        .iter()
        .enumerate()
        .filter_map(|(i, s)| {
            let t = &net.automata[i].transitions[(*s)?];
            match label.0[i] {
                StepEntry::Fire { edge, .. } => Some((i, t, edge)),
                StepEntry::Idle => None,
            }
        })
        .collect();

    let reset: BTreeSet<usize> = chosen
        .iter()
        .flat_map(|(_, t, _)| t.resets.iter().map(|x| x.0))
        .collect();
    for x in 0..net.clocks.len() {
        if !reset.contains(&x) && cfg.clocks[x] != next.clocks[x] {
            out.push(Violation::new(
                Clause::Frame,
                None,
                format!("clock {} changed without a reset", net.clocks[x]),
            ));
        }
    }
    let written: BTreeSet<usize> = chosen
        .iter()
        .flat_map(|(_, t, _)| t.assignments.iter().map(|a| a.target.0))
        .collect();
    for n in 0..net.vars.len() {
        if !written.contains(&n) && cfg.vars[n] != next.vars[n] {
            out.push(Violation::new(
                Clause::Frame,
                None,
                format!(
                    "variable {} changed without an assignment",
                    net.vars[n].name
                ),
            ));
        }
    }

    for (a, (i, ti, ei)) in chosen.iter().enumerate() {
        for (j, tj, ej) in chosen.iter().skip(a + 1) {
            if ei == ej {
                continue;
            }
            if let Some(v) = ti.updated_vars().intersection(&tj.updated_vars()).next() {
                out.push(Violation::new(
                    Clause::EdgeConsistency,
                    Some(*i),
                    format!(
                        "{} and {} (automaton #{}) both write {} with different edges",
                        ti.name, tj.name, j, net.vars[v.0].name
                    ),
                ));
            }
            if let (Some((ci, _)), Some((cj, _))) = (ti.sync.channel(), tj.sync.channel()) {
                if ci == cj {
                    out.push(Violation::new(
                        Clause::EdgeConsistency,
                        Some(*i),
                        format!(
                            "{} and {} (automaton #{}) synchronize on {} with different edges",
                            ti.name, tj.name, j, net.channels[ci.0]
                        ),
                    ));
                }
            }
        }
    }

    out.extend(sync_violations(net, cfg, label));
    out
}

fn sync_violations(net: &Network, cfg: &Configuration, label: &StepLabel) -> Vec<Violation> {
    let mut out = Vec::new();
    for (c, cname) in net.channels.iter().enumerate() {
        let with_kind = |kind: SyncKind| -> Vec<usize> {
            label
                .0
                .iter()
                .enumerate()
                .filter(|(_, e)| match e {
                    StepEntry::Fire {
                        sync: SyncLabel::Channel { channel, kind: k },
                        ..
                    } => channel.0 == c && *k == kind,
                    _ => false,
                })
                .map(|(i, _)| i)
                .collect()
        };
        let senders = with_kind(SyncKind::Send);
        let receivers = with_kind(SyncKind::Receive);
        if senders.len() > 1 {
            out.push(Violation::new(
                Clause::Sync,
                None,
                format!("{} senders on {cname}!", senders.len()),
            ));
        }
        if receivers.len() > 1 {
            out.push(Violation::new(
                Clause::Sync,
                None,
                format!("{} receivers on {cname}?", receivers.len()),
            ));
        }
        if senders.len() != receivers.len() {
            out.push(Violation::new(
                Clause::Sync,
                None,
                format!(
                    "{cname}: {} senders but {} receivers",
                    senders.len(),
                    receivers.len()
                ),
            ));
        }

        let bsenders = with_kind(SyncKind::BroadcastSend);
        let breceivers = with_kind(SyncKind::BroadcastReceive);
        if bsenders.len() > 1 {
            out.push(Violation::new(
                Clause::Sync,
                None,
                format!("{} broadcast senders on {cname}#", bsenders.len()),
            ));
        }
        if bsenders.is_empty() && !breceivers.is_empty() {
            out.push(Violation::new(
                Clause::Sync,
                None,
                format!("{cname}@ fired without a broadcast"),
            ));
        }
        if let [sender] = bsenders.as_slice() {
            for (j, a) in net.automata.iter().enumerate() {
                if j == *sender || breceivers.contains(&j) {
                    continue;
                }
                let able = a.transitions.iter().enumerate().any(|(ti, t)| {
                    t.sync == SyncLabel::on(super::ChannelId(c), SyncKind::BroadcastReceive)
                        && transition_enabled(net, cfg, j, ti).unwrap_or(false)
                });
                if able {
                    out.push(Violation::new(
                        Clause::Sync,
                        Some(j),
                        format!("{} is able to receive {cname}@ but does not", a.name),
                    ));
                }
            }
        }
    }
    out
}

/// Checks a discrete step `cfg --label--> next`.
///
/// On success returns, per automaton, the index of the transition that
/// realizes its label entry (`None` for idle automata). When several
/// transitions fit an entry, any combination satisfying every clause is
/// accepted.
pub fn check_discrete_step(
    net: &Network,
    cfg: &Configuration,
    label: &StepLabel,
    next: &Configuration,
) -> Result<Vec<Option<usize>>, Vec<Violation>> {
    let mut out = shape_violations(net, cfg, "source");
    out.extend(shape_violations(net, next, "target"));
    if label.0.len() != net.automata.len() {
        out.push(Violation::new(
            Clause::Malformed,
            None,
            format!(
                "label has {} entries for {} automata",
                label.0.len(),
                net.automata.len()
            ),
        ));
    }
    if !out.is_empty() {
        return Err(out);
    }
    if label.is_all_idle() {
        return Err(vec![Violation::new(
            Clause::DegenerateStep,
            None,
            "every automaton is idle; this is a delay, not a discrete step",
        )]);
    }

    // Candidates satisfying the per-automaton clauses.
    let mut candidates: Vec<Vec<Option<usize>>> = Vec::with_capacity(label.0.len());
    for (i, entry) in label.0.iter().enumerate() {
        let a = &net.automata[i];
        let here = cfg.locations[i];
        let there = next.locations[i];
        match entry {
            StepEntry::Idle => {
                if here != there {
                    out.push(Violation::new(
                        Clause::IdleLocation,
                        Some(i),
                        "idle automaton changed location",
                    ));
                }
                let inv = &a.locations[here.0].invariant;
                let before =
                    eval_clock_constraint(&cfg.clocks, inv, SatMode::Strict).unwrap_or(false);
                let after =
                    eval_clock_constraint(&next.clocks, inv, SatMode::Strict).unwrap_or(false);
                if !before || !after {
                    out.push(Violation::new(
                        Clause::IdleInvariant,
                        Some(i),
                        format!(
                            "invariant of {} must hold strictly around the step",
                            a.locations[here.0].name
                        ),
                    ));
                }
                candidates.push(vec![None]);
            }
            StepEntry::Fire { sync, edge } => {
                let matching: Vec<usize> = a
                    .transitions
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.source == here && t.target == there && t.sync == *sync)
                    .map(|(ti, _)| ti)
                    .collect();
                if matching.is_empty() {
                    out.push(Violation::new(
                        Clause::NoTransition,
                        Some(i),
                        format!(
                            "{} has no transition {} -> {} with this action",
                            a.name, a.locations[here.0].name, a.locations[there.0].name
                        ),
                    ));
                    candidates.push(Vec::new());
                    continue;
                }
                let mut good = Vec::new();
                let mut first_failure = None;
                for ti in matching {
                    let v = local_violations(net, cfg, next, i, &a.transitions[ti], *edge);
                    if v.is_empty() {
                        good.push(Some(ti));
                    } else if first_failure.is_none() {
                        first_failure = Some(v);
                    }
                }
                if good.is_empty() {
                    out.extend(first_failure.unwrap_or_default());
                }
                candidates.push(good);
            }
        }
    }
    if !out.is_empty() {
        return Err(out);
    }

    // Search the combinations for one meeting the network-wide clauses.
    const MAX_COMBINATIONS: usize = 1 << 16;
    let mut first_failure: Option<Vec<Violation>> = None;
    let mut index = vec![0usize; candidates.len()];
    let mut tried = 0usize;
    loop {
        let selection: Vec<Option<usize>> =
            index.iter().zip(&candidates).map(|(&k, c)| c[k]).collect();
        let v = global_violations(net, cfg, label, next, &selection);
        if v.is_empty() {
            return Ok(selection);
        }
        if first_failure.is_none() {
            first_failure = Some(v);
        }
        tried += 1;
        if tried >= MAX_COMBINATIONS {
            break;
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == index.len() {
                return Err(first_failure.unwrap_or_default());
            }
            index[pos] += 1;
            if index[pos] < candidates[pos].len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
    Err(first_failure.unwrap_or_default())
}
