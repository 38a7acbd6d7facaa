//! Lasso traces read back from solver models, replayed against the
//! executable semantics and projected to signals.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::encoder::{
    augment_with_null_transitions, clock_symbol, delta_symbol, edge_symbol, tb_symbol, vb_symbol,
    TransitionRef, TransitionTable, LOOP_SYMBOL,
};
use crate::solver::SolverModel;
use crate::ta::semantics::{
    check_discrete_step, check_initial, check_time_step, Clause, Violation,
};
use crate::ta::{Configuration, Edge, LocId, Network, Rational, StepEntry, StepLabel};
use crate::term::Value;

mod format;
mod signal;

pub use format::{format_signal, format_table, to_json};
pub use signal::{project_signal, Interval, Signal, SignalError, SignalValue};

/// A decoded lasso: positions `0..=k+1`, firings at `0..=k`, and position
/// `k+1` repeating position `loop_index`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoTrace {
    pub k: usize,
    pub loop_index: usize,
    /// `k + 2` configurations.
    pub configurations: Vec<Configuration>,
    /// `delays[l]` elapses before the firing at `l`; `k + 1` entries.
    pub delays: Vec<Rational>,
    /// `transitions[l][i]`, `k + 1` rows.
    pub transitions: Vec<Vec<TransitionRef>>,
    /// `edges[l][i]`, meaningful for declared transitions only.
    pub edges: Vec<Vec<Edge>>,
}

impl LassoTrace {
    /// Absolute time of each position: 0, δ0, δ0+δ1, ...
    pub fn times(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(self.delays.len() + 1);
        let mut t = Rational::zero();
        out.push(t.clone());
        for d in &self.delays {
            t += d;
            out.push(t.clone());
        }
        out
    }

    /// Duration of the repeating segment.
    pub fn loop_duration(&self) -> Rational {
        self.delays[self.loop_index..].iter().sum()
    }

    /// The discrete label at position `l`.
    pub fn label(&self, net: &Network, l: usize) -> StepLabel {
        StepLabel(
            self.transitions[l]
                .iter()
                .enumerate()
                .map(|(i, t)| match t {
                    TransitionRef::Null(_) => StepEntry::Idle,
                    TransitionRef::Declared(h) => StepEntry::Fire {
                        sync: net.automata[i].transitions[*h].sync,
                        edge: self.edges[l][i],
                    },
                })
                .collect(),
        )
    }

    /// Whether every automaton idles at `l`.
    pub fn is_delay_only(&self, l: usize) -> bool {
        self.transitions[l]
            .iter()
            .all(|t| matches!(t, TransitionRef::Null(_)))
    }

    /// Display name of the transition of automaton `i` at `l`; `_` for idling.
    pub fn transition_name<'a>(&self, net: &'a Network, l: usize, i: usize) -> &'a str {
        match self.transitions[l][i] {
            TransitionRef::Null(_) => "_",
            TransitionRef::Declared(h) => &net.automata[i].transitions[h].name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("model has no value for `{0}`")]
    Missing(String),
    #[error("`{0}` has the wrong sort in the model")]
    Sort(String),
    #[error("automaton #{automaton} uses unused transition code {code} at position {position}")]
    BadCode {
        automaton: usize,
        position: usize,
        code: usize,
    },
    #[error("loop index {0} is not strictly between 0 and k = {1}")]
    Loop(usize, usize),
    #[error("value of `{0}` does not fit a machine integer")]
    Overflow(String),
    #[error("bound {0} is too small")]
    Bound(usize),
}

struct Reader<'m> {
    model: &'m SolverModel,
}

impl Reader<'_> {
    fn get(&self, name: &str) -> Result<&Value, DecodeError> {
        self.model
            .get(name)
            .ok_or_else(|| DecodeError::Missing(name.to_string()))
    }

    fn bits(&self, name: &str) -> Result<&BigUint, DecodeError> {
        self.get(name)?
            .as_bits()
            .ok_or_else(|| DecodeError::Sort(name.to_string()))
    }

    fn bit(&self, name: &str, l: usize) -> Result<bool, DecodeError> {
        Ok(self.bits(name)?.bit(l as u64))
    }

    fn real(&self, name: &str) -> Result<Rational, DecodeError> {
        self.get(name)?
            .as_real()
            .cloned()
            .ok_or_else(|| DecodeError::Sort(name.to_string()))
    }
}

fn code(r: &Reader, table: &TransitionTable, i: usize, l: usize) -> Result<usize, DecodeError> {
    let mut code = 0usize;
    for j in 0..table.id_bits() as usize {
        if r.bit(&tb_symbol(i, j), l)? {
            code |= 1 << j;
        }
    }
    if code >= table.len() {
        return Err(DecodeError::BadCode {
            automaton: i,
            position: l,
            code,
        });
    }
    Ok(code)
}

fn var_value(r: &Reader, n: usize, width: u32, l: usize) -> Result<i64, DecodeError> {
    let mut raw: i128 = 0;
    for j in 0..width as usize {
        if r.bit(&vb_symbol(n, j), l)? {
            raw |= 1 << j;
        }
    }
    if width > 0 && raw >> (width - 1) & 1 == 1 {
        raw -= 1i128 << width;
    }
    raw.to_i64()
        .ok_or_else(|| DecodeError::Overflow(vb_symbol(n, 0)))
}

/// Reads a lasso out of a model of `encode_network(net, k, ..)`.
pub fn decode_trace(
    model: &SolverModel,
    net: &Network,
    k: usize,
) -> Result<LassoTrace, DecodeError> {
    if k < 2 {
        return Err(DecodeError::Bound(k));
    }
    let r = Reader { model };
    let tables = augment_with_null_transitions(net);
    let loop_index = r
        .bits(LOOP_SYMBOL)?
        .to_usize()
        .ok_or_else(|| DecodeError::Overflow(LOOP_SYMBOL.to_string()))?;
    if loop_index == 0 || loop_index >= k {
        return Err(DecodeError::Loop(loop_index, k));
    }

    let mut codes = Vec::with_capacity(k + 2);
    for l in 0..=k + 1 {
        let row = tables
            .iter()
            .enumerate()
            .map(|(i, t)| code(&r, t, i, l))
            .collect::<Result<Vec<_>, _>>()?;
        codes.push(row);
    }

    let mut configurations = Vec::with_capacity(k + 2);
    for (l, row) in codes.iter().enumerate() {
        let locations = row
            .iter()
            .enumerate()
            .map(|(i, id)| tables[i].source(*id, &net.automata[i]))
            .collect();
        let vars = net
            .vars
            .iter()
            .enumerate()
            .map(|(n, v)| var_value(&r, n, v.bit_width(), l))
            .collect::<Result<Vec<_>, _>>()?;
        let clocks = net
            .clocks
            .iter()
            .map(|c| r.real(&clock_symbol(c, l)))
            .collect::<Result<Vec<_>, _>>()?;
        configurations.push(Configuration {
            locations,
            vars,
            clocks,
        });
    }

    let delays = (0..=k)
        .map(|l| r.real(&delta_symbol(l)))
        .collect::<Result<Vec<_>, _>>()?;
    let transitions = codes[..=k]
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(i, id)| tables[i].entries[*id])
                .collect()
        })
        .collect();
    let mut edges = Vec::with_capacity(k + 1);
    for l in 0..=k {
        let row = (0..net.automata.len())
            .map(|i| {
                Ok(if r.bit(&edge_symbol(i), l)? {
                    Edge::RightClosed
                } else {
                    Edge::LeftClosed
                })
            })
            .collect::<Result<Vec<_>, DecodeError>>()?;
        edges.push(row);
    }
    Ok(LassoTrace {
        k,
        loop_index,
        configurations,
        delays,
        transitions,
        edges,
    })
}

/// A violation found while replaying position `position` of a trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceViolation {
    pub position: usize,
    pub violation: Violation,
}

impl std::fmt::Display for TraceViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "position {}: {}", self.position, self.violation)
    }
}

fn structural(position: usize, detail: String) -> TraceViolation {
    TraceViolation {
        position,
        violation: Violation {
            clause: Clause::Malformed,
            automaton: None,
            detail,
        },
    }
}

fn shape(tr: &LassoTrace, net: &Network) -> Vec<TraceViolation> {
    let mut out = Vec::new();
    let k = tr.k;
    if tr.configurations.len() != k + 2 {
        out.push(structural(
            0,
            format!("{} configurations for k = {k}", tr.configurations.len()),
        ));
    }
    if tr.delays.len() != k + 1 || tr.transitions.len() != k + 1 || tr.edges.len() != k + 1 {
        out.push(structural(
            0,
            format!("step rows do not have k + 1 = {} entries", k + 1),
        ));
    }
    if tr.loop_index == 0 || tr.loop_index >= k {
        out.push(structural(
            0,
            format!("loop {} outside (0, {k})", tr.loop_index),
        ));
    }
    for (l, row) in tr.transitions.iter().enumerate() {
        if row.len() != net.automata.len()
            || tr
                .edges
                .get(l)
                .is_none_or(|e| e.len() != net.automata.len())
        {
            out.push(structural(
                l,
                "row length differs from the automaton count".into(),
            ));
            continue;
        }
        for (i, t) in row.iter().enumerate() {
            let a = &net.automata[i];
            let ok = match t {
                TransitionRef::Null(q) => q.0 < a.locations.len(),
                TransitionRef::Declared(h) => *h < a.transitions.len(),
            };
            if !ok {
                out.push(structural(
                    l,
                    format!("automaton #{i} has no transition {t:?}"),
                ));
                continue;
            }
            let source = match t {
                TransitionRef::Null(q) => *q,
                TransitionRef::Declared(h) => a.transitions[*h].source,
            };
            if tr.configurations.get(l).and_then(|c| c.locations.get(i)) != Some(&source) {
                out.push(structural(
                    l,
                    format!("automaton #{i} is not at the source of its transition"),
                ));
            }
        }
    }
    out
}

/// Replays `tr` against the semantics. Every position gets a time step and,
/// unless everyone idles, a discrete step; then the wrap back to the loop
/// is checked. Comparisons are exact.
pub fn validate_trace(tr: &LassoTrace, net: &Network) -> Result<(), Vec<TraceViolation>> {
    let out = shape(tr, net);
    if !out.is_empty() {
        return Err(out);
    }
    let mut out = Vec::new();
    let at = |position: usize| {
        move |violation: Violation| TraceViolation {
            position,
            violation,
        }
    };
    if let Err(vs) = check_initial(net, &tr.configurations[0]) {
        out.extend(vs.into_iter().map(at(0)));
    }
    for l in 0..=tr.k {
        let cfg = &tr.configurations[l];
        let next = &tr.configurations[l + 1];
        let delay = &tr.delays[l];
        let mid = cfg.delayed(delay);
        if let Err(vs) = check_time_step(net, cfg, delay, &mid) {
            out.extend(vs.into_iter().map(at(l)));
        }
        if tr.is_delay_only(l) {
            if &mid != next {
                out.push(TraceViolation {
                    position: l,
                    violation: Violation {
                        clause: Clause::TimeDiscrete,
                        automaton: None,
                        detail: "no automaton fires but the configuration changes beyond the delay"
                            .into(),
                    },
                });
            }
        } else if let Err(vs) = check_discrete_step(net, &mid, &tr.label(net, l), next) {
            out.extend(vs.into_iter().map(at(l)));
        }
    }
    let last = &tr.configurations[tr.k + 1];
    let back = &tr.configurations[tr.loop_index];
    if last != back {
        out.push(TraceViolation {
            position: tr.k + 1,
            violation: Violation {
                clause: Clause::LoopWrap,
                automaton: None,
                detail: format!(
                    "configuration differs from the one at loop position {}",
                    tr.loop_index
                ),
            },
        });
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// First position whose configuration satisfies `pred`.
pub fn find_position(tr: &LassoTrace, pred: impl FnMut(&Configuration) -> bool) -> Option<usize> {
    tr.configurations.iter().position(pred)
}

/// Location names of automaton `i` along the trace.
pub fn location_names<'a>(tr: &LassoTrace, net: &'a Network, i: usize) -> Vec<&'a str> {
    tr.configurations
        .iter()
        .map(|c| net.automata[i].locations[c.locations[i].0].name.as_str())
        .collect()
}

/// The symbol values under which `decode_trace` gives back `tr`. Position
/// `k + 1` repeats the transitions and edges of the loop position.
pub fn model_of_trace(tr: &LassoTrace, net: &Network) -> SolverModel {
    let tables = augment_with_null_transitions(net);
    let width = (tr.k + 2) as u64;
    let row = |l: usize| if l <= tr.k { l } else { tr.loop_index };
    let pack = |bit: &dyn Fn(usize) -> bool| {
        let mut v = BigUint::zero();
        for l in 0..width as usize {
            if bit(l) {
                v.set_bit(l as u64, true);
            }
        }
        Value::Bv {
            width: width as u32,
            bits: v,
        }
    };
    let mut m = SolverModel::default();
    for (i, table) in tables.iter().enumerate() {
        let ids: Vec<usize> = (0..width as usize)
            .map(|l| {
                let t = tr.transitions[row(l)][i];
                table.entries.iter().position(|e| *e == t).unwrap_or(0)
            })
            .collect();
        for j in 0..table.id_bits() as usize {
            m.insert(tb_symbol(i, j), pack(&|l| ids[l] >> j & 1 == 1));
        }
        m.insert(
            edge_symbol(i),
            pack(&|l| tr.edges[row(l)][i] == Edge::RightClosed),
        );
    }
    for (n, v) in net.vars.iter().enumerate() {
        let w = v.bit_width();
        for j in 0..w as usize {
            m.insert(
                vb_symbol(n, j),
                pack(&|l| (tr.configurations[l].vars[n] as i128) >> j & 1 == 1),
            );
        }
    }
    for (x, name) in net.clocks.iter().enumerate() {
        for (l, c) in tr.configurations.iter().enumerate() {
            m.insert(clock_symbol(name, l), Value::Real(c.clocks[x].clone()));
        }
    }
    for (l, d) in tr.delays.iter().enumerate() {
        m.insert(delta_symbol(l), Value::Real(d.clone()));
    }
    m.insert(
        LOOP_SYMBOL,
        Value::Bv {
            width: width as u32,
            bits: BigUint::from(tr.loop_index),
        },
    );
    m
}

pub(crate) fn location_name(net: &Network, i: usize, q: LocId) -> &str {
    &net.automata[i].locations[q.0].name
}
