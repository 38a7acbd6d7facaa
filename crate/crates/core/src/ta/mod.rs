//! Networks of timed automata with bounded integer variables.
//!
//! The types here are the static model ([`Network`]) and the dynamic state
//! ([`Configuration`]). [`semantics`] gives them an executable meaning: guard
//! evaluation, weak satisfaction, and checks for discrete and time steps.
//! Those checks are the reference every decoded solver trace is replayed
//! against.

pub mod semantics;

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::span::SourceMap;

pub use semantics::{
    check_discrete_step, check_initial, check_time_step, eval_clock_constraint, eval_expr,
    eval_var_constraint, transition_enabled, Clause, SatMode, SemanticsError, Violation,
};

/// Exact clock values. Clock arithmetic never touches floating point.
pub type Rational = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ChannelId(pub usize);

/// Index of a location inside its automaton; `LocId(0)` is the initial one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocId(pub usize);

/// Relation of a clock atom. Equality is deliberately absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClockRel {
    Lt,
    Gt,
    Le,
    Ge,
}

impl ClockRel {
    pub fn is_strict(self) -> bool {
        matches!(self, ClockRel::Lt | ClockRel::Gt)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            ClockRel::Lt => "<",
            ClockRel::Gt => ">",
            ClockRel::Le => "<=",
            ClockRel::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClockAtom {
    pub clock: ClockId,
    pub rel: ClockRel,
    pub bound: u64,
}

/// Conjunction of clock atoms; the empty conjunction is `true`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ClockConstraint {
    pub atoms: Vec<ClockAtom>,
}

impl ClockConstraint {
    pub fn top() -> Self {
        ClockConstraint { atoms: Vec::new() }
    }

    pub fn atom(clock: ClockId, rel: ClockRel, bound: u64) -> Self {
        ClockConstraint {
            atoms: vec![ClockAtom { clock, rel, bound }],
        }
    }

    pub fn and(mut self, clock: ClockId, rel: ClockRel, bound: u64) -> Self {
        self.atoms.push(ClockAtom { clock, rel, bound });
        self
    }

    pub fn is_top(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarRel {
    Lt,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarOperand {
    Var(VarId),
    Const(i64),
}

/// Variable constraint: `n ~ c | n ~ n' | not g | g and g` with `~` in `{<, =}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VarConstraint {
    True,
    Atom {
        lhs: VarId,
        rel: VarRel,
        rhs: VarOperand,
    },
    Not(Box<VarConstraint>),
    And(Box<VarConstraint>, Box<VarConstraint>),
}

impl VarConstraint {
    pub fn atom(lhs: VarId, rel: VarRel, rhs: VarOperand) -> Self {
        VarConstraint::Atom { lhs, rel, rhs }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        VarConstraint::Not(Box::new(self))
    }

    pub fn and(self, other: VarConstraint) -> Self {
        match (self, other) {
            (VarConstraint::True, o) => o,
            (s, VarConstraint::True) => s,
            (s, o) => VarConstraint::And(Box::new(s), Box::new(o)),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, VarConstraint::True)
    }

    /// Every variable mentioned by the constraint.
    pub fn vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            VarConstraint::True => {}
            VarConstraint::Atom { lhs, rhs, .. } => {
                out.insert(*lhs);
                if let VarOperand::Var(v) = rhs {
                    out.insert(*v);
                }
            }
            VarConstraint::Not(g) => g.vars(out),
            VarConstraint::And(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

/// Integer expression `exp + exp | exp - exp | n | c`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(i64),
    Var(VarId),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn add(a: Expr, b: Expr) -> Expr {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn vars(&self, out: &mut BTreeSet<VarId>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(*v);
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Add(a, b) | Expr::Sub(a, b) => a.leaves() + b.leaves(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    pub target: VarId,
    pub expr: Expr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SyncKind {
    /// `c!`
    Send,
    /// `c?`
    Receive,
    /// `c#`
    BroadcastSend,
    /// `c@`
    BroadcastReceive,
}

impl SyncKind {
    pub fn symbol(self) -> char {
        match self {
            SyncKind::Send => '!',
            SyncKind::Receive => '?',
            SyncKind::BroadcastSend => '#',
            SyncKind::BroadcastReceive => '@',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyncLabel {
    Tau,
    Channel { channel: ChannelId, kind: SyncKind },
}

impl SyncLabel {
    pub fn on(channel: ChannelId, kind: SyncKind) -> Self {
        SyncLabel::Channel { channel, kind }
    }

    pub fn channel(self) -> Option<(ChannelId, SyncKind)> {
        match self {
            SyncLabel::Tau => None,
            SyncLabel::Channel { channel, kind } => Some((channel, kind)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub name: String,
    pub source: LocId,
    pub target: LocId,
    pub sync: SyncLabel,
    pub clock_guard: ClockConstraint,
    pub var_guard: VarConstraint,
    pub resets: Vec<ClockId>,
    pub assignments: Vec<Assignment>,
}

impl Transition {
    pub fn new(name: impl Into<String>, source: LocId, target: LocId) -> Self {
        Transition {
            name: name.into(),
            source,
            target,
            sync: SyncLabel::Tau,
            clock_guard: ClockConstraint::top(),
            var_guard: VarConstraint::True,
            resets: Vec::new(),
            assignments: Vec::new(),
        }
    }

    /// Variables written by the transition.
    pub fn updated_vars(&self) -> BTreeSet<VarId> {
        self.assignments.iter().map(|a| a.target).collect()
    }

    pub fn writes(&self, var: VarId) -> bool {
        self.assignments.iter().any(|a| a.target == var)
    }

    pub fn resets_clock(&self, clock: ClockId) -> bool {
        self.resets.contains(&clock)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub name: String,
    pub invariant: ClockConstraint,
    pub labels: BTreeSet<String>,
}

impl Location {
    pub fn new(name: impl Into<String>) -> Self {
        Location {
            name: name.into(),
            invariant: ClockConstraint::top(),
            labels: BTreeSet::new(),
        }
    }
}

/// One timed automaton. `locations[0]` is the initial location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub name: String,
    pub locations: Vec<Location>,
    pub transitions: Vec<Transition>,
}

impl Automaton {
    pub fn location_index(&self, name: &str) -> Option<LocId> {
        self.locations
            .iter()
            .position(|l| l.name == name)
            .map(LocId)
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    pub fn location(&self, id: LocId) -> Option<&Location> {
        self.locations.get(id.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
    pub init: i64,
}

impl VariableDecl {
    /// Smallest twos-complement width covering `[lo, hi]`.
    pub fn bit_width(&self) -> u32 {
        signed_width_for_range(self.lo, self.hi)
    }

    pub fn contains(&self, value: i64) -> bool {
        self.lo <= value && value <= self.hi
    }
}

/// Smallest `w >= 1` with `-2^(w-1) <= lo` and `hi <= 2^(w-1) - 1`.
pub fn signed_width_for_range(lo: i64, hi: i64) -> u32 {
    let mut w = 1u32;
    loop {
        let min = -(1i128 << (w - 1));
        let max = (1i128 << (w - 1)) - 1;
        if min <= lo as i128 && hi as i128 <= max {
            return w;
        }
        w += 1;
    }
}

/// A network of timed automata sharing clocks, variables and channels.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Network {
    pub clocks: Vec<String>,
    pub vars: Vec<VariableDecl>,
    pub channels: Vec<String>,
    pub automata: Vec<Automaton>,
    pub spans: SourceMap,
}

impl Network {
    pub fn clock_index(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name).map(ClockId)
    }

    pub fn var_index(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    pub fn channel_index(&self, name: &str) -> Option<ChannelId> {
        self.channels.iter().position(|c| c == name).map(ChannelId)
    }

    pub fn automaton_index(&self, name: &str) -> Option<usize> {
        self.automata.iter().position(|a| a.name == name)
    }

    pub fn var(&self, id: VarId) -> Option<&VariableDecl> {
        self.vars.get(id.0)
    }

    /// All atomic propositions used by any location.
    pub fn propositions(&self) -> BTreeSet<String> {
        self.automata
            .iter()
            .flat_map(|a| a.locations.iter())
            .flat_map(|l| l.labels.iter().cloned())
            .collect()
    }

    /// The configuration every trace starts from.
    pub fn initial_configuration(&self) -> Configuration {
        Configuration {
            locations: vec![LocId(0); self.automata.len()],
            vars: self.vars.iter().map(|v| v.init).collect(),
            clocks: vec![Rational::zero(); self.clocks.len()],
        }
    }
}

/// Dynamic state: one location per automaton plus both valuations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub locations: Vec<LocId>,
    pub vars: Vec<i64>,
    pub clocks: Vec<Rational>,
}

impl Configuration {
    /// The same configuration after `delta` time units.
    pub fn delayed(&self, delta: &Rational) -> Configuration {
        Configuration {
            locations: self.locations.clone(),
            vars: self.vars.clone(),
            clocks: self.clocks.iter().map(|c| c + delta).collect(),
        }
    }
}

/// Interval edge of a transition at its firing instant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Edge {
    /// Excluded-included, `)[`: the new configuration holds at the instant.
    LeftClosed,
    /// Included-excluded, `](`: the old configuration holds at the instant.
    RightClosed,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Edge::LeftClosed => f.write_str(")["),
            Edge::RightClosed => f.write_str("]("),
        }
    }
}

/// Per-automaton entry of a discrete step label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepEntry {
    /// The automaton takes no transition.
    Idle,
    Fire {
        sync: SyncLabel,
        edge: Edge,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StepLabel(pub Vec<StepEntry>);

impl StepLabel {
    pub fn idle(n: usize) -> Self {
        StepLabel(vec![StepEntry::Idle; n])
    }

    pub fn is_all_idle(&self) -> bool {
        self.0.iter().all(|e| matches!(e, StepEntry::Idle))
    }
}
