//! Encoding of bounded lasso runs of a network into BitVector and real
//! arithmetic constraints.
//!
//! A run has positions `0..=k+1`. At each position `l <= k` time first
//! advances by `delta_l > 0`, then every automaton takes exactly one of its
//! transitions, where the per-location null transitions stand for "does
//! nothing". Positions `loop..=k` repeat forever after position `k+1`, whose
//! state equals the state at `loop`.
//!
//! Transition choices are log-encoded: automaton `i` owns
//! `ceil(log2 |T_i|)` bit-vectors `tb_i_j` of width `k+2`; bit `l` of the
//! conjunction of `tb_i_j` or its complement (per the bits of a transition
//! id) tells whether that transition is active at `l`.
//!
//! Reserved names, all of which the trace decoder reads back:
//!
//! | name | sort | meaning |
//! |---|---|---|
//! | `tb_<i>_<j>` | `(_ BitVec k+2)` | bit `j` of automaton `i`'s transition id per position |
//! | `edgeRC_<i>` | `(_ BitVec k+2)` | 1 = right-closed firing, 0 = left-closed |
//! | `vb_<n>_<j>` | `(_ BitVec k+2)` | bit `j` of variable `n` per position |
//! | `x_<clock>_<l>` | `Real` | clock value at position `l` |
//! | `delta_<l>` | `Real` | delay before the firing at `l` |
//! | `loop` | `(_ BitVec k+2)` | first position of the repeated segment |
//!
//! plus defined helpers `tr_<i>_<h>` (transition aliases), `loc_<i>_<q>`
//! (location aliases) and `var_<n>_<l>` (variable values).

use thiserror::Error;

use crate::ta::{
    signed_width_for_range, ClockConstraint, ClockRel, Expr, LocId, Network, SyncKind, SyncLabel,
    Transition, VarConstraint, VarOperand, VarRel,
};
use crate::term::{RealRel, Script, ScriptError, Sort, Term, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("bound k = {0} is too small: the loop needs 0 < loop < k, so k >= 2")]
    BoundTooSmall(usize),
    #[error("network is not valid: {0}")]
    Invalid(String),
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Script(#[from] ScriptError),
}

/// Which interval edges firings may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EdgePolicy {
    /// Every firing is right-closed `](`.
    #[default]
    RightClosed,
    /// The solver picks `](` or `)[` per automaton and position.
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Liveness {
    None,
    /// Every automaton fires a declared transition inside the loop.
    #[default]
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodeOptions {
    pub edges: EdgePolicy,
    pub liveness: Liveness,
}

/// An element of an automaton's augmented transition set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransitionRef {
    /// The self-loop at a location that stands for doing nothing.
    Null(LocId),
    /// Index into the automaton's declared transitions.
    Declared(usize),
}

/// Augmented transition set of one automaton: null transitions first (by
/// location), then the declared ones in declaration order. The position in
/// `entries` is the transition's id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    pub entries: Vec<TransitionRef>,
    locations: usize,
}

impl TransitionTable {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of `tb` vectors needed to number every entry.
    pub fn id_bits(&self) -> u32 {
        ceil_log2(self.entries.len())
    }

    pub fn null_id(&self, q: LocId) -> usize {
        q.0
    }

    pub fn declared_id(&self, t: usize) -> usize {
        self.locations + t
    }

    pub fn source(&self, id: usize, automaton: &crate::ta::Automaton) -> LocId {
        match self.entries[id] {
            TransitionRef::Null(q) => q,
            TransitionRef::Declared(t) => automaton.transitions[t].source,
        }
    }

    pub fn target(&self, id: usize, automaton: &crate::ta::Automaton) -> LocId {
        match self.entries[id] {
            TransitionRef::Null(q) => q,
            TransitionRef::Declared(t) => automaton.transitions[t].target,
        }
    }
}

/// `ceil(log2 n)`, with `ceil_log2(1) = 0`.
pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

pub fn augment_with_null_transitions(net: &Network) -> Vec<TransitionTable> {
    net.automata
        .iter()
        .map(|a| TransitionTable {
            entries: (0..a.locations.len())
                .map(|q| TransitionRef::Null(LocId(q)))
                .chain((0..a.transitions.len()).map(TransitionRef::Declared))
                .collect(),
            locations: a.locations.len(),
        })
        .collect()
}

/// Bit-wise conjunction selecting id `id` out of the `tb` vectors (least
/// significant first). With no vectors the single transition is always
/// active, so the alias is all ones.
pub fn alias_from_bits(tb: &[Term], id: usize, width: u32) -> Result<Term, TermError> {
    if tb.is_empty() {
        return Term::bv_ones(width);
    }
    let factors = tb
        .iter()
        .enumerate()
        .map(|(j, v)| {
            if id >> j & 1 == 1 {
                Ok(v.clone())
            } else {
                v.clone().bvnot()
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Term::bvand(factors)
}

/// Id code of position `l`: bit `l` of every `tb` vector, most significant
/// vector first.
pub fn code_at(tb: &[Term], l: u32) -> Result<Term, TermError> {
    let mut code: Option<Term> = None;
    for v in tb.iter().rev() {
        let b = v.clone().slice(l, l)?;
        code = Some(match code {
            None => b,
            Some(c) => c.concat(b)?,
        });
    }
    code.ok_or(TermError::Empty("code"))
}

/// Clock-constraint flavours: strict or weak, at `x(l)` or at `x(l) + delta(l)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardVariant {
    Sigma,
    SigmaDelta,
    SigmaWeak,
    SigmaWeakDelta,
}

impl GuardVariant {
    fn weak(self) -> bool {
        matches!(self, GuardVariant::SigmaWeak | GuardVariant::SigmaWeakDelta)
    }

    fn delayed(self) -> bool {
        matches!(
            self,
            GuardVariant::SigmaDelta | GuardVariant::SigmaWeakDelta
        )
    }
}

/// Symbols and aliases of an encoding, shared with the property encoder.
#[derive(Debug, Clone)]
pub struct PropertyHook {
    pub k: usize,
    /// `loc[i][q]`: location alias of automaton `i`, location `q`.
    pub loc: Vec<Vec<Term>>,
    /// `tr[i][h]`: transition alias for id `h` of automaton `i`.
    pub tr: Vec<Vec<Term>>,
    /// `var[n][l]`: value of variable `n` at position `l`.
    pub var: Vec<Vec<Term>>,
    pub var_widths: Vec<u32>,
}

impl PropertyHook {
    /// Positions `0..=k+1`.
    pub fn positions(&self) -> std::ops::RangeInclusive<usize> {
        0..=self.k + 1
    }

    pub fn at(&self, automaton: usize, q: LocId, l: usize) -> Result<Term, TermError> {
        self.loc[automaton][q.0].clone().bit(l as u32)
    }

    pub fn active(&self, automaton: usize, id: usize, l: usize) -> Result<Term, TermError> {
        self.tr[automaton][id].clone().bit(l as u32)
    }

    /// Signed comparison semantics of a variable constraint at `l`.
    pub fn mu(&self, l: usize, g: &VarConstraint) -> Result<Term, TermError> {
        match g {
            VarConstraint::True => Ok(Term::tt()),
            VarConstraint::Not(a) => self.mu(l, a)?.not(),
            VarConstraint::And(a, b) => Term::and([self.mu(l, a)?, self.mu(l, b)?]),
            VarConstraint::Atom { lhs, rel, rhs } => {
                let a = self.var[lhs.0][l].clone();
                let b = match rhs {
                    VarOperand::Var(v) => self.var[v.0][l].clone(),
                    VarOperand::Const(c) => Term::bv(*c, signed_width_for_range(*c, *c))?,
                };
                let w = expect_width(&a).max(expect_width(&b));
                let (a, b) = (a.sign_extend_to(w)?, b.sign_extend_to(w)?);
                match rel {
                    VarRel::Lt => a.bvslt(b),
                    VarRel::Eq => a.eq(b),
                }
            }
        }
    }
}

fn expect_width(t: &Term) -> u32 {
    t.sort().width().expect("bit-vector term")
}

/// The declared symbols of an encoding.
#[derive(Debug, Clone)]
pub struct EncodingContext<'n> {
    pub net: &'n Network,
    pub k: usize,
    pub tables: Vec<TransitionTable>,
    pub tb: Vec<Vec<Term>>,
    pub edge: Vec<Term>,
    pub vb: Vec<Vec<Term>>,
    /// `x[c][l]` for `l` in `0..=k+1`.
    pub x: Vec<Vec<Term>>,
    /// `delta[l]` for `l` in `0..=k`.
    pub delta: Vec<Term>,
    pub loop_pos: Term,
    pub hook: PropertyHook,
}

pub fn clock_symbol(clock: &str, l: usize) -> String {
    format!("x_{clock}_{l}")
}

pub fn tb_symbol(i: usize, j: usize) -> String {
    format!("tb_{i}_{j}")
}

pub fn edge_symbol(i: usize) -> String {
    format!("edgeRC_{i}")
}

pub fn vb_symbol(n: usize, j: usize) -> String {
    format!("vb_{n}_{j}")
}

pub fn delta_symbol(l: usize) -> String {
    format!("delta_{l}")
}

pub const LOOP_SYMBOL: &str = "loop";

type Terms = Result<Vec<Term>, EncodeError>;

impl<'n> EncodingContext<'n> {
    /// Declares every symbol and defines the aliases in `script`.
    pub fn new(net: &'n Network, k: usize, script: &mut Script) -> Result<Self, EncodeError> {
        if k < 2 {
            return Err(EncodeError::BoundTooSmall(k));
        }
        if net.automata.iter().any(|a| a.locations.is_empty()) {
            return Err(EncodeError::Invalid("an automaton has no locations".into()));
        }
        let width = (k + 2) as u32;
        let bv = Sort::BitVec(width);
        let tables = augment_with_null_transitions(net);

        let mut tb = Vec::new();
        for (i, t) in tables.iter().enumerate() {
            let vs = (0..t.id_bits() as usize)
                .map(|j| script.declare(tb_symbol(i, j), bv))
                .collect::<Result<Vec<_>, _>>()?;
            tb.push(vs);
        }
        let edge = (0..net.automata.len())
            .map(|i| script.declare(edge_symbol(i), bv))
            .collect::<Result<Vec<_>, _>>()?;
        let var_widths: Vec<u32> = net.vars.iter().map(|v| v.bit_width()).collect();
        let mut vb = Vec::new();
        for (n, w) in var_widths.iter().enumerate() {
            let vs = (0..*w as usize)
                .map(|j| script.declare(vb_symbol(n, j), bv))
                .collect::<Result<Vec<_>, _>>()?;
            vb.push(vs);
        }
        let mut x = Vec::new();
        for c in &net.clocks {
            let vs = (0..=k + 1)
                .map(|l| script.declare(clock_symbol(c, l), Sort::Real))
                .collect::<Result<Vec<_>, _>>()?;
            x.push(vs);
        }
        let delta = (0..=k)
            .map(|l| script.declare(delta_symbol(l), Sort::Real))
            .collect::<Result<Vec<_>, _>>()?;
        let loop_pos = script.declare(LOOP_SYMBOL, bv)?;

        let mut tr = Vec::new();
        let mut loc = Vec::new();
        for (i, (a, table)) in net.automata.iter().zip(&tables).enumerate() {
            let mut aliases = Vec::new();
            for h in 0..table.len() {
                let body = alias_from_bits(&tb[i], h, width)?;
                aliases.push(script.define(format!("tr_{i}_{h}"), body)?);
            }
            let mut locs = Vec::new();
            for q in 0..a.locations.len() {
                let from_q = (0..table.len())
                    .filter(|h| table.source(*h, a) == LocId(q))
                    .map(|h| aliases[h].clone());
                locs.push(script.define(format!("loc_{i}_{q}"), Term::bvor(from_q)?)?);
            }
            tr.push(aliases);
            loc.push(locs);
        }
        let mut var = Vec::new();
        for (n, bits) in vb.iter().enumerate() {
            let mut per_pos = Vec::new();
            for l in 0..=k + 1 {
                let value = code_at(bits, l as u32)?;
                per_pos.push(script.define(format!("var_{n}_{l}"), value)?);
            }
            var.push(per_pos);
        }

        Ok(EncodingContext {
            net,
            k,
            tables,
            tb,
            edge,
            vb,
            x,
            delta,
            loop_pos,
            hook: PropertyHook {
                k,
                loc,
                tr,
                var,
                var_widths,
            },
        })
    }

    fn width(&self) -> u32 {
        (self.k + 2) as u32
    }

    fn active(&self, i: usize, h: usize, l: usize) -> Result<Term, TermError> {
        self.hook.active(i, h, l)
    }

    fn edge_bit(&self, i: usize, l: usize) -> Result<Term, TermError> {
        self.edge[i].clone().bit(l as u32)
    }

    /// Declared transitions of automaton `i` with their ids.
    fn declared(&self, i: usize) -> impl Iterator<Item = (usize, &'n Transition)> + '_ {
        let table = &self.tables[i];
        self.net.automata[i]
            .transitions
            .iter()
            .enumerate()
            .map(move |(t, tr)| (table.declared_id(t), tr))
    }

    /// Some declared transition of `i` is active at `l`.
    fn fires(&self, i: usize, l: usize) -> Result<Term, TermError> {
        Term::or(
            self.declared(i)
                .map(|(h, _)| self.active(i, h, l))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    fn clock_value(&self, clock: usize, l: usize, delayed: bool) -> Result<Term, TermError> {
        let x = self.x[clock][l].clone();
        if delayed {
            Term::real_add([x, self.delta[l].clone()])
        } else {
            Ok(x)
        }
    }

    /// The clock constraint `g` read at position `l` in the given variant.
    pub fn clock_guard_term(
        &self,
        l: usize,
        g: &ClockConstraint,
        variant: GuardVariant,
    ) -> Result<Term, TermError> {
        let atoms = g
            .atoms
            .iter()
            .map(|a| {
                let v = self.clock_value(a.clock.0, l, variant.delayed())?;
                let rel = match (a.rel, variant.weak()) {
                    (ClockRel::Lt, false) => RealRel::Lt,
                    (ClockRel::Gt, false) => RealRel::Gt,
                    (ClockRel::Lt, true) | (ClockRel::Le, _) => RealRel::Le,
                    (ClockRel::Gt, true) | (ClockRel::Ge, _) => RealRel::Ge,
                };
                Term::real_cmp(rel, v, Term::real_int(a.bound as i64))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Term::and(atoms)
    }

    /// Value of `e` at position `l` as a `width`-bit vector, modulo `2^width`.
    fn zeta(&self, l: usize, e: &Expr, width: u32) -> Result<Term, TermError> {
        match e {
            Expr::Const(c) => Term::bv_wrapping(*c, width),
            Expr::Var(v) => self.hook.var[v.0][l].clone().sign_extend_to(width),
            Expr::Add(a, b) => self.zeta(l, a, width)?.bvadd(self.zeta(l, b, width)?),
            Expr::Sub(a, b) => self.zeta(l, a, width)?.bvsub(self.zeta(l, b, width)?),
        }
    }

    /// Width at which `e` evaluates without overflow.
    fn safe_width(&self, e: &Expr, target_width: u32) -> u32 {
        fn widest(ctx: &EncodingContext, e: &Expr) -> u32 {
            match e {
                Expr::Const(c) => signed_width_for_range(*c, *c),
                Expr::Var(v) => ctx.hook.var_widths[v.0],
                Expr::Add(a, b) | Expr::Sub(a, b) => widest(ctx, a).max(widest(ctx, b)),
            }
        }
        widest(self, e).max(target_width) + ceil_log2(e.leaves()) + 1
    }

    /// Transition target states: the destination location follows every
    /// active transition.
    pub fn targets(&self) -> Terms {
        let k = self.k as u32;
        let mut out = Vec::new();
        for (i, a) in self.net.automata.iter().enumerate() {
            let table = &self.tables[i];
            for h in 0..table.len() {
                let now = self.hook.tr[i][h].clone().slice(k, 0)?;
                let next = self.hook.loc[i][table.target(h, a).0]
                    .clone()
                    .slice(k + 1, 1)?;
                let implication = Term::bvor([now.bvnot()?, next])?;
                out.push(implication.eq(Term::bv_ones(k + 1)?)?);
            }
        }
        Ok(out)
    }

    /// Clock guards hold at the firing instant.
    pub fn clock_guards(&self) -> Terms {
        let mut out = Vec::new();
        for i in 0..self.net.automata.len() {
            for (h, t) in self.declared(i) {
                if t.clock_guard.is_top() {
                    continue;
                }
                for l in 0..=self.k {
                    let g = self.clock_guard_term(l, &t.clock_guard, GuardVariant::SigmaDelta)?;
                    out.push(self.active(i, h, l)?.implies(g)?);
                }
            }
        }
        Ok(out)
    }

    /// Variable guards hold before firing.
    pub fn var_guards(&self) -> Terms {
        let mut out = Vec::new();
        for i in 0..self.net.automata.len() {
            for (h, t) in self.declared(i) {
                if t.var_guard.is_true() {
                    continue;
                }
                for l in 0..=self.k {
                    let g = self.hook.mu(l, &t.var_guard)?;
                    out.push(self.active(i, h, l)?.implies(g)?);
                }
            }
        }
        Ok(out)
    }

    /// Reset clocks are zero at the next position.
    pub fn resets(&self) -> Terms {
        let mut out = Vec::new();
        for i in 0..self.net.automata.len() {
            for (h, t) in self.declared(i) {
                for c in &t.resets {
                    for l in 0..=self.k {
                        let zero = self.x[c.0][l + 1].clone().eq(Term::real_int(0))?;
                        out.push(self.active(i, h, l)?.implies(zero)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Assigned variables take the expression's value; firing is only
    /// allowed if that value stays inside the declared range.
    pub fn assignments(&self) -> Terms {
        let mut out = Vec::new();
        for i in 0..self.net.automata.len() {
            for (h, t) in self.declared(i) {
                for asg in &t.assignments {
                    let n = asg.target.0;
                    let decl = &self.net.vars[n];
                    let width = self.hook.var_widths[n];
                    let wide = self.safe_width(&asg.expr, width);
                    for l in 0..=self.k {
                        let value = self.zeta(l, &asg.expr, width)?;
                        let exact = self.zeta(l, &asg.expr, wide)?;
                        let body = Term::and([
                            self.hook.var[n][l + 1].clone().eq(value)?,
                            Term::bv(decl.lo, wide)?.bvsle(exact.clone())?,
                            exact.bvsle(Term::bv(decl.hi, wide)?)?,
                        ])?;
                        out.push(self.active(i, h, l)?.implies(body)?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Source and destination invariants around a firing, strict or weak
    /// depending on the edge.
    pub fn invariants(&self) -> Terms {
        use GuardVariant::*;
        let mut out = Vec::new();
        for (i, a) in self.net.automata.iter().enumerate() {
            for (h, t) in self.declared(i) {
                let src = &a.locations[t.source.0].invariant;
                let dst = &a.locations[t.target.0].invariant;
                if src.is_top() && dst.is_top() {
                    continue;
                }
                for l in 0..=self.k {
                    let edge = self.edge_bit(i, l)?;
                    let right_closed = Term::and([
                        self.clock_guard_term(l, src, SigmaDelta)?,
                        self.clock_guard_term(l + 1, dst, SigmaWeak)?,
                        edge.clone(),
                    ])?;
                    let left_closed = Term::and([
                        self.clock_guard_term(l, src, SigmaWeakDelta)?,
                        self.clock_guard_term(l + 1, dst, Sigma)?,
                        edge.not()?,
                    ])?;
                    out.push(
                        self.active(i, h, l)?
                            .implies(Term::or([right_closed, left_closed])?)?,
                    );
                }
            }
        }
        Ok(out)
    }

    /// Invariants of automata that stay put: weakly after every delay, and
    /// strictly around the instant if some other automaton fires.
    pub fn idle_invariants(&self) -> Terms {
        use GuardVariant::*;
        let mut out = Vec::new();
        for l in 0..=self.k {
            let anyone_fires = Term::or(
                (0..self.net.automata.len())
                    .map(|i| self.fires(i, l))
                    .collect::<Result<Vec<_>, _>>()?,
            )?;
            for (i, a) in self.net.automata.iter().enumerate() {
                for (q, location) in a.locations.iter().enumerate() {
                    if location.invariant.is_top() {
                        continue;
                    }
                    let inv = &location.invariant;
                    let idle = self.active(i, self.tables[i].null_id(LocId(q)), l)?;
                    out.push(idle.clone().implies(self.clock_guard_term(
                        l,
                        inv,
                        SigmaWeakDelta,
                    )?)?);
                    let strict = Term::and([
                        self.clock_guard_term(l, inv, SigmaDelta)?,
                        self.clock_guard_term(l + 1, inv, Sigma)?,
                    ])?;
                    out.push(Term::and([idle, anyone_fires.clone()])?.implies(strict)?);
                }
            }
        }
        Ok(out)
    }

    /// Untouched clocks advance by the delay, unwritten variables keep
    /// their value, and delays are positive.
    pub fn frame_conditions(&self) -> Terms {
        let mut out = Vec::new();
        for l in 0..=self.k {
            out.push(Term::real_cmp(
                RealRel::Gt,
                self.delta[l].clone(),
                Term::real_int(0),
            )?);
        }
        for c in 0..self.net.clocks.len() {
            for l in 0..=self.k {
                let next = self.x[c][l + 1].clone();
                let elapse = next.clone().eq(self.clock_value(c, l, true)?)?;
                let mut resetters = Vec::new();
                for i in 0..self.net.automata.len() {
                    for (h, t) in self.declared(i) {
                        if t.resets.iter().any(|r| r.0 == c) {
                            resetters.push(self.active(i, h, l)?);
                        }
                    }
                }
                let reset = Term::and([Term::or(resetters)?, next.eq(Term::real_int(0))?])?;
                out.push(Term::or([elapse, reset])?);
            }
        }
        for n in 0..self.net.vars.len() {
            for l in 0..=self.k {
                let keep = self.hook.var[n][l + 1]
                    .clone()
                    .eq(self.hook.var[n][l].clone())?;
                let mut writers = vec![keep];
                for i in 0..self.net.automata.len() {
                    for (h, t) in self.declared(i) {
                        if t.assignments.iter().any(|a| a.target.0 == n) {
                            writers.push(self.active(i, h, l)?);
                        }
                    }
                }
                out.push(Term::or(writers)?);
            }
        }
        Ok(out)
    }

    /// Initial locations, zero clocks, initial variable values and strict
    /// initial invariants at position 0.
    pub fn init(&self) -> Terms {
        let mut out = Vec::new();
        for (i, a) in self.net.automata.iter().enumerate() {
            out.push(self.hook.at(i, LocId(0), 0)?);
            out.push(self.clock_guard_term(0, &a.locations[0].invariant, GuardVariant::Sigma)?);
        }
        for c in 0..self.net.clocks.len() {
            out.push(self.x[c][0].clone().eq(Term::real_int(0))?);
        }
        for (n, v) in self.net.vars.iter().enumerate() {
            out.push(
                self.hook.var[n][0]
                    .clone()
                    .eq(Term::bv(v.init, self.hook.var_widths[n])?)?,
            );
        }
        Ok(out)
    }

    /// Per automaton, whether any of its transitions with `pred` is active.
    fn fires_where(
        &self,
        i: usize,
        l: usize,
        pred: impl Fn(&Transition) -> bool,
    ) -> Result<Term, TermError> {
        Term::or(
            self.declared(i)
                .filter(|(_, t)| pred(t))
                .map(|(h, _)| self.active(i, h, l))
                .collect::<Result<Vec<_>, _>>()?,
        )
    }

    fn at_most_one(terms: &[Term]) -> Terms {
        let mut out = Vec::new();
        for (a, x) in terms.iter().enumerate() {
            for y in &terms[a + 1..] {
                out.push(Term::and([x.clone(), y.clone()])?.not()?);
            }
        }
        Ok(out)
    }

    /// Channel synchronization and edge agreement between automata that
    /// synchronize or write a common variable.
    pub fn sync(&self) -> Terms {
        let net = self.net;
        let automata = net.automata.len();
        let mut out = Vec::new();
        for l in 0..=self.k {
            for c in 0..net.channels.len() {
                let on = |kind: SyncKind| {
                    move |t: &Transition| t.sync == SyncLabel::on(crate::ta::ChannelId(c), kind)
                };
                let per_automaton = |kind: SyncKind| -> Terms {
                    (0..automata)
                        .map(|i| Ok(self.fires_where(i, l, on(kind))?))
                        .collect()
                };
                let send = per_automaton(SyncKind::Send)?;
                let recv = per_automaton(SyncKind::Receive)?;
                let bsend = per_automaton(SyncKind::BroadcastSend)?;
                let brecv = per_automaton(SyncKind::BroadcastReceive)?;

                let live = |v: &[Term]| {
                    v.iter()
                        .filter(|t| !t.is_false())
                        .cloned()
                        .collect::<Vec<_>>()
                };
                let (send_l, recv_l, bsend_l, brecv_l) =
                    (live(&send), live(&recv), live(&bsend), live(&brecv));
                if [&send_l, &recv_l, &bsend_l, &brecv_l]
                    .iter()
                    .all(|v| v.is_empty())
                {
                    continue;
                }
                out.extend(Self::at_most_one(&send_l)?);
                out.extend(Self::at_most_one(&recv_l)?);
                if !send_l.is_empty() || !recv_l.is_empty() {
                    out.push(Term::or(send_l.clone())?.eq(Term::or(recv_l.clone())?)?);
                }

                out.extend(Self::at_most_one(&bsend_l)?);
                let any_bsend = Term::or(bsend_l.clone())?;
                for r in &brecv_l {
                    out.push(r.clone().implies(any_bsend.clone())?);
                }
                for j in 0..automata {
                    if brecv[j].is_false() {
                        continue;
                    }
                    let others =
                        Term::or((0..automata).filter(|i| *i != j).map(|i| bsend[i].clone()))?;
                    if others.is_false() {
                        continue;
                    }
                    let mut able = Vec::new();
                    for (_, t) in self
                        .declared(j)
                        .filter(|(_, t)| on(SyncKind::BroadcastReceive)(t))
                    {
                        able.push(Term::and([
                            self.hook.at(j, t.source, l)?,
                            self.clock_guard_term(l, &t.clock_guard, GuardVariant::SigmaDelta)?,
                            self.hook.mu(l, &t.var_guard)?,
                        ])?);
                    }
                    let forced = Term::and([others, Term::or(able)?])?;
                    out.push(forced.implies(brecv[j].clone())?);
                }

                let participants: Vec<Term> = (0..automata)
                    .map(|i| {
                        self.fires_where(i, l, |t| {
                            t.sync.channel().is_some_and(|(ch, _)| ch.0 == c)
                        })
                    })
                    .collect::<Result<_, _>>()?;
                out.extend(self.edge_agreement(l, &participants)?);
            }
            for n in 0..net.vars.len() {
                let writers: Vec<Term> = (0..automata)
                    .map(|i| self.fires_where(i, l, |t| t.writes(crate::ta::VarId(n))))
                    .collect::<Result<_, _>>()?;
                out.extend(self.edge_agreement(l, &writers)?);
            }
        }
        Ok(out)
    }

    /// `involved[i]` and `involved[j]` at `l` force equal edges.
    fn edge_agreement(&self, l: usize, involved: &[Term]) -> Terms {
        let mut out = Vec::new();
        for i in 0..involved.len() {
            for j in i + 1..involved.len() {
                if involved[i].is_false() || involved[j].is_false() {
                    continue;
                }
                let both = Term::and([involved[i].clone(), involved[j].clone()])?;
                out.push(both.implies(self.edge_bit(i, l)?.eq(self.edge_bit(j, l)?)?)?);
            }
        }
        Ok(out)
    }

    /// `0 < loop < k`, and the state at `k+1` repeats the state at `loop`.
    pub fn loop_constraints(&self) -> Terms {
        let w = self.width();
        let k = self.k;
        let mut out = vec![
            Term::bv(0, w)?.bvult(self.loop_pos.clone())?,
            self.loop_pos.clone().bvult(Term::bv(k as u64, w)?)?,
        ];
        let same_bit = |v: &Term, l: usize| -> Result<Term, TermError> {
            v.clone()
                .slice(l as u32, l as u32)?
                .eq(v.clone().slice(k as u32 + 1, k as u32 + 1)?)
        };
        for l in 1..k {
            let mut same = Vec::new();
            for v in self
                .tb
                .iter()
                .flatten()
                .chain(&self.edge)
                .chain(self.vb.iter().flatten())
            {
                same.push(same_bit(v, l)?);
            }
            for xs in &self.x {
                same.push(xs[l].clone().eq(xs[k + 1].clone())?);
            }
            let here = self.loop_pos.clone().eq(Term::bv(l as u64, w)?)?;
            out.push(here.implies(Term::and(same)?)?);
        }
        Ok(out)
    }

    /// Every automaton fires a declared transition inside the loop.
    pub fn liveness(&self, mode: Liveness) -> Terms {
        if mode == Liveness::None {
            return Ok(Vec::new());
        }
        let w = self.width();
        let mut out = Vec::new();
        for i in 0..self.net.automata.len() {
            let mut somewhere = Vec::new();
            for l in 1..=self.k {
                let fires = self.fires(i, l)?;
                if fires.is_false() {
                    continue;
                }
                let in_loop = self.loop_pos.clone().bvule(Term::bv(l as u64, w)?)?;
                somewhere.push(Term::and([in_loop, fires])?);
            }
            out.push(Term::or(somewhere)?);
        }
        Ok(out)
    }

    /// Codes beyond the last transition id never occur.
    pub fn well_formed(&self) -> Terms {
        let mut out = Vec::new();
        for (i, table) in self.tables.iter().enumerate() {
            let bits = table.id_bits();
            if bits == 0 || table.len() == 1 << bits {
                continue;
            }
            for l in 0..=self.k + 1 {
                let code = code_at(&self.tb[i], l as u32)?;
                out.push(code.bvult(Term::bv(table.len() as u64, bits)?)?);
            }
        }
        Ok(out)
    }

    pub fn edge_policy(&self, policy: EdgePolicy) -> Terms {
        match policy {
            EdgePolicy::Free => Ok(Vec::new()),
            EdgePolicy::RightClosed => self
                .edge
                .iter()
                .map(|e| Ok(e.clone().eq(Term::bv_ones(self.width())?)?))
                .collect(),
        }
    }
}

/// A network's run constraints at bound `k`.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub script: Script,
    pub hook: PropertyHook,
    pub tables: Vec<TransitionTable>,
    pub k: usize,
}

pub fn encode_network(
    net: &Network,
    k: usize,
    options: EncodeOptions,
) -> Result<Encoding, EncodeError> {
    let mut script = Script::new();
    let ctx = EncodingContext::new(net, k, &mut script)?;
    let groups = [
        ctx.init()?,
        ctx.well_formed()?,
        ctx.targets()?,
        ctx.clock_guards()?,
        ctx.var_guards()?,
        ctx.resets()?,
        ctx.assignments()?,
        ctx.invariants()?,
        ctx.idle_invariants()?,
        ctx.frame_conditions()?,
        ctx.sync()?,
        ctx.loop_constraints()?,
        ctx.liveness(options.liveness)?,
        ctx.edge_policy(options.edges)?,
    ];
    for g in groups {
        script.assert_all(g)?;
    }
    let hook = ctx.hook.clone();
    let tables = ctx.tables.clone();
    Ok(Encoding {
        script,
        hook,
        tables,
        k,
    })
}

#[cfg(test)]
mod tests;
