//! Textual model format: parsing, static validation and pretty printing.
//!
//! ```text
//! clock x;
//! var n : [0, 1] = 0;
//! channel c;
//! automaton A {
//!   init q0;
//!   location q0 inv x < 2 labels {p, q};
//!   location q2;
//!   trans t1: q0 -> q2 when x > 5 and n = 0 sync c! reset {x} do {n := n + 1};
//! }
//! ```
//!
//! Variable comparisons accept `<`, `=`, `>`, `<=`, `>=`, `!=`, `not`,
//! `and` and `or`; they are desugared into the core `<`, `=`, negation and
//! conjunction. Clock comparisons may only appear as top-level conjuncts and
//! never use equality.

pub(crate) mod lexer;
pub(crate) mod parser;
mod print;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::span::{Entity, Span};
use crate::ta::{
    Assignment, Automaton, ChannelId, ClockConstraint, ClockId, ClockRel, Expr, LocId, Location,
    Network, SyncKind, SyncLabel, Transition, VarConstraint, VarId, VarOperand, VarRel,
    VariableDecl,
};
use parser::{Cond, Decl, ExprAst, Operand};

pub use print::{format_clock_constraint, format_expr, format_var_constraint, print_network};

/// Largest magnitude accepted for integer literals.
pub const LITERAL_LIMIT: i64 = i32::MAX as i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    Io,
    Lex,
    Syntax,
    Duplicate,
    Undeclared,
    EmptyRange,
    InitOutOfRange,
    LiteralRange,
    /// Clock compared with `=`/`!=`, with a negative constant, or against
    /// another clock.
    ClockAtom,
    /// Clock comparison under negation or disjunction, or in an expression.
    ClockContext,
    /// A clock-free comparison used as a location invariant.
    InvariantNotClock,
    WidthRule,
    DoubleAssignment,
    SyncMixing,
    DeadChannel,
    UnusedChannel,
    /// The network's indices do not line up (only for hand-built networks).
    Structure,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::Io => "io",
            Code::Lex => "lex",
            Code::Syntax => "syntax",
            Code::Duplicate => "duplicate",
            Code::Undeclared => "undeclared",
            Code::EmptyRange => "empty-range",
            Code::InitOutOfRange => "init-out-of-range",
            Code::LiteralRange => "literal-range",
            Code::ClockAtom => "clock-atom",
            Code::ClockContext => "clock-context",
            Code::InvariantNotClock => "invariant-not-clock",
            Code::WidthRule => "width-rule",
            Code::DoubleAssignment => "double-assignment",
            Code::SyncMixing => "sync-mixing",
            Code::DeadChannel => "dead-channel",
            Code::UnusedChannel => "unused-channel",
            Code::Structure => "structure",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub code: Code,
    pub span: Option<Span>,
    pub message: String,
}

impl ParseDiagnostic {
    pub fn error(code: Code, span: Option<Span>, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Error,
            code,
            span,
            message: message.into(),
        }
    }

    pub fn warning(code: Code, span: Option<Span>, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            severity: Severity::Warning,
            code,
            span,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.span {
            Some(s) => write!(f, "{sev}[{}] {s}: {}", self.code.as_str(), self.message),
            None => write!(f, "{sev}[{}]: {}", self.code.as_str(), self.message),
        }
    }
}

/// A failed parse or validation; holds every diagnostic, including warnings.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct Diagnostics(pub Vec<ParseDiagnostic>);

impl Diagnostics {
    pub fn errors(&self) -> impl Iterator<Item = &ParseDiagnostic> {
        self.0.iter().filter(|d| d.is_error())
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

/// A successfully parsed network and the warnings raised on the way.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub network: Network,
    pub warnings: Vec<ParseDiagnostic>,
}

pub fn parse_network(text: &str) -> Result<Parsed, Diagnostics> {
    let toks = lexer::lex(text).map_err(|e| {
        Diagnostics(vec![ParseDiagnostic::error(
            Code::Lex,
            Some(e.span),
            e.message,
        )])
    })?;
    let decls = parser::Parser::new(toks).parse_file().map_err(|e| {
        Diagnostics(vec![ParseDiagnostic::error(
            Code::Syntax,
            Some(e.span),
            e.message,
        )])
    })?;
    let (network, mut diags) = Builder::default().build(decls);
    if diags.iter().any(|d| d.is_error()) {
        return Err(Diagnostics(diags));
    }
    match validate_network(&network) {
        Ok(warnings) => {
            diags.extend(warnings);
            Ok(Parsed {
                network,
                warnings: diags,
            })
        }
        Err(Diagnostics(more)) => {
            diags.extend(more);
            Err(Diagnostics(diags))
        }
    }
}

pub fn parse_file(path: &Path) -> Result<Parsed, Diagnostics> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Diagnostics(vec![ParseDiagnostic::error(
            Code::Io,
            None,
            format!("cannot read {}: {e}", path.display()),
        )])
    })?;
    parse_network(&text)
}

#[derive(Default)]
struct Builder {
    clocks: HashMap<String, ClockId>,
    vars: HashMap<String, VarId>,
    channels: HashMap<String, ChannelId>,
    diags: Vec<ParseDiagnostic>,
}

fn flip(rel: &'static str) -> &'static str {
    match rel {
        "<" => ">",
        ">" => "<",
        "<=" => ">=",
        ">=" => "<=",
        other => other,
    }
}

impl Builder {
    fn err(&mut self, code: Code, span: Span, message: String) {
        self.diags
            .push(ParseDiagnostic::error(code, Some(span), message));
    }

    fn build(mut self, decls: Vec<Decl>) -> (Network, Vec<ParseDiagnostic>) {
        let mut net = Network::default();
        let mut automata = Vec::new();
        for d in decls {
            match d {
                Decl::Clock((name, span)) => {
                    let id = ClockId(net.clocks.len());
                    self.clocks.entry(name.clone()).or_insert(id);
                    net.spans.insert(Entity::Clock(id.0), span);
                    net.clocks.push(name);
                }
                Decl::Channel((name, span)) => {
                    let id = ChannelId(net.channels.len());
                    self.channels.entry(name.clone()).or_insert(id);
                    net.spans.insert(Entity::Channel(id.0), span);
                    net.channels.push(name);
                }
                Decl::Var { name, lo, hi, init } => {
                    let id = VarId(net.vars.len());
                    self.vars.entry(name.0.clone()).or_insert(id);
                    net.spans.insert(Entity::Var(id.0), name.1);
                    net.vars.push(VariableDecl {
                        name: name.0,
                        lo: lo.0,
                        hi: hi.0,
                        init: init.0,
                    });
                }
                Decl::Automaton(a) => automata.push(a),
            }
        }
        for a in automata {
            let idx = net.automata.len();
            let aut = self.automaton(idx, a, &mut net);
            net.automata.push(aut);
        }
        (net, self.diags)
    }

    fn automaton(&mut self, idx: usize, a: parser::AutomatonAst, net: &mut Network) -> Automaton {
        net.spans.insert(Entity::Automaton(idx), a.name.1);
        let mut order: Vec<usize> = (0..a.locations.len()).collect();
        match &a.init {
            Some((q, span)) => match a.locations.iter().position(|l| &l.name.0 == q) {
                Some(i) => {
                    order.retain(|&j| j != i);
                    order.insert(0, i);
                }
                None => self.err(
                    Code::Undeclared,
                    *span,
                    format!("initial location `{q}` is not a location of `{}`", a.name.0),
                ),
            },
            None if a.locations.is_empty() => self.err(
                Code::Structure,
                a.name.1,
                format!("automaton `{}` has no locations", a.name.0),
            ),
            None => {}
        }
        let mut locs: HashMap<String, LocId> = HashMap::new();
        let mut locations = Vec::new();
        for (new_id, &old) in order.iter().enumerate() {
            let l = &a.locations[old];
            locs.entry(l.name.0.clone()).or_insert(LocId(new_id));
            net.spans.insert(Entity::Location(idx, new_id), l.name.1);
            let mut loc = Location::new(l.name.0.clone());
            if let Some(inv) = &l.inv {
                let (clock, var) = self.split_guard(inv);
                if !var.is_true() {
                    self.err(
                        Code::InvariantNotClock,
                        l.name.1,
                        format!("invariant of `{}` may only constrain clocks", l.name.0),
                    );
                }
                loc.invariant = clock;
            }
            loc.labels = l.labels.iter().map(|(p, _)| p.clone()).collect();
            locations.push(loc);
        }
        let mut transitions = Vec::new();
        for (tidx, t) in a.transitions.into_iter().enumerate() {
            net.spans.insert(Entity::Transition(idx, tidx), t.name.1);
            let resolve_loc = |this: &mut Self, (q, span): &(String, Span)| match locs.get(q) {
                Some(id) => *id,
                None => {
                    this.err(
                        Code::Undeclared,
                        *span,
                        format!("unknown location `{q}` in automaton `{}`", a.name.0),
                    );
                    LocId(0)
                }
            };
            let source = resolve_loc(self, &t.source);
            let target = resolve_loc(self, &t.target);
            let mut tr = Transition::new(t.name.0.clone(), source, target);
            if let Some(g) = &t.when {
                let (clock, var) = self.split_guard(g);
                tr.clock_guard = clock;
                tr.var_guard = var;
            }
            if let Some(((c, span), kind)) = &t.sync {
                let kind = match kind {
                    '!' => SyncKind::Send,
                    '?' => SyncKind::Receive,
                    '#' => SyncKind::BroadcastSend,
                    _ => SyncKind::BroadcastReceive,
                };
                match self.channels.get(c) {
                    Some(id) => tr.sync = SyncLabel::on(*id, kind),
                    None => self.err(Code::Undeclared, *span, format!("unknown channel `{c}`")),
                }
            }
            for (x, span) in &t.resets {
                match self.clocks.get(x) {
                    Some(id) => {
                        if !tr.resets.contains(id) {
                            tr.resets.push(*id);
                        }
                    }
                    None => self.err(Code::Undeclared, *span, format!("unknown clock `{x}`")),
                }
            }
            for ((n, span), e) in &t.assigns {
                let target = match self.vars.get(n) {
                    Some(id) => *id,
                    None => {
                        let msg = if self.clocks.contains_key(n) {
                            format!("clock `{n}` can only be reset, not assigned")
                        } else {
                            format!("unknown variable `{n}`")
                        };
                        self.err(Code::Undeclared, *span, msg);
                        continue;
                    }
                };
                if let Some(expr) = self.expr(e) {
                    tr.assignments.push(Assignment { target, expr });
                }
            }
            transitions.push(tr);
        }
        Automaton {
            name: a.name.0,
            locations,
            transitions,
        }
    }

    fn mentions_clock(&self, c: &Cond) -> bool {
        let is_clock =
            |o: &Operand| matches!(o, Operand::Name((n, _)) if self.clocks.contains_key(n));
        match c {
            Cond::True => false,
            Cond::Cmp { lhs, rhs, .. } => is_clock(lhs) || is_clock(rhs),
            Cond::Not(a) => self.mentions_clock(a),
            Cond::And(a, b) | Cond::Or(a, b) => self.mentions_clock(a) || self.mentions_clock(b),
        }
    }

    /// Splits a guard into its clock part and its variable part. Clock-free
    /// subtrees are kept whole so printing and re-parsing preserves shape.
    fn split_guard(&mut self, c: &Cond) -> (ClockConstraint, VarConstraint) {
        let mut clock = ClockConstraint::top();
        let mut var = VarConstraint::True;
        let mut stack = vec![c];
        let mut conjuncts = Vec::new();
        while let Some(c) = stack.pop() {
            match c {
                Cond::And(a, b) if self.mentions_clock(c) => {
                    stack.push(b);
                    stack.push(a);
                }
                other => conjuncts.push(other),
            }
        }
        for c in conjuncts {
            if !self.mentions_clock(c) {
                var = var.and(self.var_cond(c));
                continue;
            }
            match c {
                Cond::Cmp {
                    lhs,
                    rel,
                    rhs,
                    span,
                } => {
                    if let Some((id, rel, bound)) = self.clock_atom(lhs, rel, rhs, *span) {
                        clock = clock.and(id, rel, bound);
                    }
                }
                _ => self.err(
                    Code::ClockContext,
                    cond_span(c),
                    "clock comparisons may only be combined with `and`".to_string(),
                ),
            }
        }
        (clock, var)
    }

    fn clock_atom(
        &mut self,
        lhs: &Operand,
        rel: &'static str,
        rhs: &Operand,
        span: Span,
    ) -> Option<(ClockId, ClockRel, u64)> {
        let (name, rel, bound) = match (lhs, rhs) {
            (Operand::Name((n, _)), Operand::Int(v, _)) => (n, rel, *v),
            (Operand::Int(v, _), Operand::Name((n, _))) => (n, flip(rel), *v),
            _ => {
                self.err(
                    Code::ClockAtom,
                    span,
                    "a clock can only be compared with an integer constant".to_string(),
                );
                return None;
            }
        };
        let id = self.clocks[name];
        let rel = match rel {
            "<" => ClockRel::Lt,
            ">" => ClockRel::Gt,
            "<=" => ClockRel::Le,
            ">=" => ClockRel::Ge,
            _ => {
                self.err(
                    Code::ClockAtom,
                    span,
                    format!("clock `{name}` cannot be compared with `{rel}`"),
                );
                return None;
            }
        };
        if bound < 0 {
            self.err(
                Code::ClockAtom,
                span,
                format!("clock `{name}` compared with negative constant {bound}"),
            );
            return None;
        }
        Some((id, rel, bound as u64))
    }

    fn var_operand(&mut self, o: &Operand) -> Option<VarOperand> {
        match o {
            Operand::Int(v, _) => Some(VarOperand::Const(*v)),
            Operand::Name((n, span)) => match self.vars.get(n) {
                Some(id) => Some(VarOperand::Var(*id)),
                None => {
                    self.err(Code::Undeclared, *span, format!("unknown variable `{n}`"));
                    None
                }
            },
        }
    }

    fn var_cond(&mut self, c: &Cond) -> VarConstraint {
        match c {
            Cond::True => VarConstraint::True,
            Cond::Not(a) => self.var_cond(a).not(),
            Cond::And(a, b) => {
                let a = self.var_cond(a);
                let b = self.var_cond(b);
                VarConstraint::And(Box::new(a), Box::new(b))
            }
            Cond::Or(a, b) => {
                let a = self.var_cond(a);
                let b = self.var_cond(b);
                VarConstraint::And(Box::new(a.not()), Box::new(b.not())).not()
            }
            Cond::Cmp {
                lhs,
                rel,
                rhs,
                span,
            } => {
                let (l, r) = match (self.var_operand(lhs), self.var_operand(rhs)) {
                    (Some(l), Some(r)) => (l, r),
                    _ => return VarConstraint::True,
                };
                let (lhs, rel, rhs) = match (l, r) {
                    (VarOperand::Var(v), r) => (v, *rel, r),
                    (VarOperand::Const(c), VarOperand::Var(v)) => {
                        (v, flip(rel), VarOperand::Const(c))
                    }
                    (VarOperand::Const(_), VarOperand::Const(_)) => {
                        self.err(
                            Code::Syntax,
                            *span,
                            "a comparison needs at least one variable".to_string(),
                        );
                        return VarConstraint::True;
                    }
                };
                desugar(lhs, rel, rhs)
            }
        }
    }

    fn expr(&mut self, e: &ExprAst) -> Option<Expr> {
        Some(match e {
            ExprAst::Int(v) => Expr::Const(*v),
            ExprAst::Name((n, span)) => match self.vars.get(n) {
                Some(id) => Expr::Var(*id),
                None => {
                    let (code, msg) = if self.clocks.contains_key(n) {
                        (
                            Code::ClockContext,
                            format!("clock `{n}` used in an expression"),
                        )
                    } else {
                        (Code::Undeclared, format!("unknown variable `{n}`"))
                    };
                    self.err(code, *span, msg);
                    return None;
                }
            },
            ExprAst::Add(a, b) => Expr::add(self.expr(a)?, self.expr(b)?),
            ExprAst::Sub(a, b) => Expr::sub(self.expr(a)?, self.expr(b)?),
        })
    }
}

fn cond_span(c: &Cond) -> Span {
    match c {
        Cond::True => Span::default(),
        Cond::Cmp { span, .. } => *span,
        Cond::Not(a) => cond_span(a),
        Cond::And(a, b) | Cond::Or(a, b) => cond_span(a).to(cond_span(b)),
    }
}

/// Rewrites `lhs rel rhs` with the full relation set into the core grammar.
pub(crate) fn desugar(lhs: VarId, rel: &str, rhs: VarOperand) -> VarConstraint {
    let lt = VarConstraint::atom(lhs, VarRel::Lt, rhs);
    let eq = VarConstraint::atom(lhs, VarRel::Eq, rhs);
    match rel {
        "<" => lt,
        "=" => eq,
        "!=" => eq.not(),
        ">=" => lt.not(),
        "<=" => VarConstraint::And(Box::new(lt.not()), Box::new(eq.not())).not(),
        // ">"
        _ => match rhs {
            VarOperand::Var(r) => VarConstraint::atom(r, VarRel::Lt, VarOperand::Var(lhs)),
            VarOperand::Const(_) => VarConstraint::And(Box::new(lt.not()), Box::new(eq.not())),
        },
    }
}

fn check_literal(out: &mut Vec<ParseDiagnostic>, v: i64, span: Option<Span>, what: &str) {
    if !(-LITERAL_LIMIT..=LITERAL_LIMIT).contains(&v) {
        out.push(ParseDiagnostic::error(
            Code::LiteralRange,
            span,
            format!("{what} {v} exceeds the 32-bit literal range"),
        ));
    }
}

fn expr_consts(e: &Expr, out: &mut Vec<i64>) {
    match e {
        Expr::Const(c) => out.push(*c),
        Expr::Var(_) => {}
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            expr_consts(a, out);
            expr_consts(b, out);
        }
    }
}

fn guard_consts(g: &VarConstraint, out: &mut Vec<i64>) {
    match g {
        VarConstraint::True => {}
        VarConstraint::Atom { rhs, .. } => {
            if let VarOperand::Const(c) = rhs {
                out.push(*c);
            }
        }
        VarConstraint::Not(a) => guard_consts(a, out),
        VarConstraint::And(a, b) => {
            guard_consts(a, out);
            guard_consts(b, out);
        }
    }
}

/// Checks the cross-cutting rules of a network. Returns the warnings on
/// success; on failure every diagnostic, warnings included.
pub fn validate_network(net: &Network) -> Result<Vec<ParseDiagnostic>, Diagnostics> {
    let mut out = Vec::new();
    let span = |e: Entity| net.spans.get(e);

    // Clocks, variables and channels share one namespace.
    let mut globals: HashMap<&str, &str> = HashMap::new();
    let named = net
        .clocks
        .iter()
        .enumerate()
        .map(|(i, n)| (n, "clock", Entity::Clock(i)))
        .chain(
            net.vars
                .iter()
                .enumerate()
                .map(|(i, v)| (&v.name, "variable", Entity::Var(i))),
        )
        .chain(
            net.channels
                .iter()
                .enumerate()
                .map(|(i, n)| (n, "channel", Entity::Channel(i))),
        );
    for (name, kind, entity) in named {
        if let Some(prev) = globals.insert(name.as_str(), kind) {
            out.push(ParseDiagnostic::error(
                Code::Duplicate,
                span(entity),
                format!("{kind} `{name}` clashes with an earlier {prev} of the same name"),
            ));
        }
    }
    let mut automaton_names = BTreeSet::new();
    for (i, a) in net.automata.iter().enumerate() {
        if !automaton_names.insert(a.name.as_str()) {
            out.push(ParseDiagnostic::error(
                Code::Duplicate,
                span(Entity::Automaton(i)),
                format!("automaton `{}` declared twice", a.name),
            ));
        }
    }

    for (i, v) in net.vars.iter().enumerate() {
        let s = span(Entity::Var(i));
        for (val, what) in [
            (v.lo, "lower bound"),
            (v.hi, "upper bound"),
            (v.init, "initial value"),
        ] {
            check_literal(&mut out, val, s, what);
        }
        if v.lo > v.hi {
            out.push(ParseDiagnostic::error(
                Code::EmptyRange,
                s,
                format!("variable `{}` has empty range [{}, {}]", v.name, v.lo, v.hi),
            ));
        } else if !v.contains(v.init) {
            out.push(ParseDiagnostic::error(
                Code::InitOutOfRange,
                s,
                format!(
                    "initial value {} of `{}` is outside [{}, {}]",
                    v.init, v.name, v.lo, v.hi
                ),
            ));
        }
    }

    let clock_ok = |c: ClockId| c.0 < net.clocks.len();
    let var_ok = |v: VarId| v.0 < net.vars.len();
    let mut usage: BTreeMap<usize, BTreeMap<SyncKind, BTreeSet<usize>>> = BTreeMap::new();

    for (ai, a) in net.automata.iter().enumerate() {
        if a.locations.is_empty() {
            out.push(ParseDiagnostic::error(
                Code::Structure,
                span(Entity::Automaton(ai)),
                format!("automaton `{}` has no locations", a.name),
            ));
        }
        let mut loc_names = BTreeSet::new();
        for (li, l) in a.locations.iter().enumerate() {
            let s = span(Entity::Location(ai, li));
            if !loc_names.insert(l.name.as_str()) {
                out.push(ParseDiagnostic::error(
                    Code::Duplicate,
                    s,
                    format!("location `{}` declared twice in `{}`", l.name, a.name),
                ));
            }
            for atom in &l.invariant.atoms {
                if !clock_ok(atom.clock) {
                    out.push(ParseDiagnostic::error(
                        Code::Structure,
                        s,
                        "invariant refers to a missing clock",
                    ));
                } else if atom.bound > LITERAL_LIMIT as u64 {
                    check_literal(&mut out, i64::MAX, s, "clock constant");
                }
            }
        }
        let mut trans_names = BTreeSet::new();
        for (ti, t) in a.transitions.iter().enumerate() {
            let s = span(Entity::Transition(ai, ti));
            if !trans_names.insert(t.name.as_str()) {
                out.push(ParseDiagnostic::error(
                    Code::Duplicate,
                    s,
                    format!("transition `{}` declared twice in `{}`", t.name, a.name),
                ));
            }
            if t.source.0 >= a.locations.len() || t.target.0 >= a.locations.len() {
                out.push(ParseDiagnostic::error(
                    Code::Structure,
                    s,
                    format!("transition `{}` refers to a missing location", t.name),
                ));
            }
            for atom in &t.clock_guard.atoms {
                if !clock_ok(atom.clock) {
                    out.push(ParseDiagnostic::error(
                        Code::Structure,
                        s,
                        "guard refers to a missing clock",
                    ));
                } else if atom.bound > LITERAL_LIMIT as u64 {
                    check_literal(&mut out, i64::MAX, s, "clock constant");
                }
            }
            if t.resets.iter().any(|c| !clock_ok(*c)) {
                out.push(ParseDiagnostic::error(
                    Code::Structure,
                    s,
                    "reset of a missing clock",
                ));
            }
            let mut used = BTreeSet::new();
            t.var_guard.vars(&mut used);
            for asg in &t.assignments {
                used.insert(asg.target);
                asg.expr.vars(&mut used);
            }
            if used.iter().any(|v| !var_ok(*v)) {
                out.push(ParseDiagnostic::error(
                    Code::Structure,
                    s,
                    "reference to a missing variable",
                ));
                continue;
            }
            let mut consts = Vec::new();
            guard_consts(&t.var_guard, &mut consts);
            for asg in &t.assignments {
                expr_consts(&asg.expr, &mut consts);
            }
            for c in consts {
                check_literal(&mut out, c, s, "constant");
            }
            let mut targets = BTreeSet::new();
            for asg in &t.assignments {
                let target = &net.vars[asg.target.0];
                if !targets.insert(asg.target) {
                    out.push(ParseDiagnostic::error(
                        Code::DoubleAssignment,
                        s,
                        format!(
                            "`{}` assigned twice by transition `{}`",
                            target.name, t.name
                        ),
                    ));
                }
                let mut read = BTreeSet::new();
                asg.expr.vars(&mut read);
                for r in read {
                    let source = &net.vars[r.0];
                    if source.bit_width() > target.bit_width() {
                        out.push(ParseDiagnostic::error(
                            Code::WidthRule,
                            s,
                            format!(
                                "`{}` ({} bits) is wider than the assigned `{}` ({} bits)",
                                source.name,
                                source.bit_width(),
                                target.name,
                                target.bit_width()
                            ),
                        ));
                    }
                }
            }
            if let SyncLabel::Channel { channel, kind } = t.sync {
                if channel.0 >= net.channels.len() {
                    out.push(ParseDiagnostic::error(
                        Code::Structure,
                        s,
                        "sync on a missing channel",
                    ));
                } else {
                    usage
                        .entry(channel.0)
                        .or_default()
                        .entry(kind)
                        .or_default()
                        .insert(ai);
                }
            }
        }
    }

    for (ci, name) in net.channels.iter().enumerate() {
        let s = span(Entity::Channel(ci));
        let Some(kinds) = usage.get(&ci) else {
            out.push(ParseDiagnostic::warning(
                Code::UnusedChannel,
                s,
                format!("channel `{name}` is never used"),
            ));
            continue;
        };
        let one_to_one =
            kinds.contains_key(&SyncKind::Send) || kinds.contains_key(&SyncKind::Receive);
        let broadcast = kinds.contains_key(&SyncKind::BroadcastSend)
            || kinds.contains_key(&SyncKind::BroadcastReceive);
        if one_to_one && broadcast {
            out.push(ParseDiagnostic::error(
                Code::SyncMixing,
                s,
                format!(
                    "channel `{name}` mixes one-to-one (!/?) and broadcast (#/@) synchronization"
                ),
            ));
            continue;
        }
        let partners = |a: SyncKind, b: SyncKind| -> bool {
            match (kinds.get(&a), kinds.get(&b)) {
                (Some(xs), Some(ys)) => xs.iter().any(|x| ys.iter().any(|y| x != y)),
                _ => false,
            }
        };
        let dead =
            |kind: SyncKind, partner: SyncKind, what: &str, out: &mut Vec<ParseDiagnostic>| {
                if kinds.contains_key(&kind) && !partners(kind, partner) {
                    out.push(ParseDiagnostic::warning(
                        Code::DeadChannel,
                        s,
                        format!(
                            "`{name}{}` has no {what} in another automaton and can never fire",
                            kind.symbol()
                        ),
                    ));
                }
            };
        dead(SyncKind::Send, SyncKind::Receive, "receiver", &mut out);
        dead(SyncKind::Receive, SyncKind::Send, "sender", &mut out);
        dead(
            SyncKind::BroadcastReceive,
            SyncKind::BroadcastSend,
            "broadcast sender",
            &mut out,
        );
    }

    if out.iter().any(|d| d.is_error()) {
        Err(Diagnostics(out))
    } else {
        Ok(out)
    }
}
