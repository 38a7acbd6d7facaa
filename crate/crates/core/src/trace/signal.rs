use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use super::LassoTrace;
use crate::encoder::TransitionRef;
use crate::ta::{Configuration, Edge, Network, Rational, VarId};

/// Propositions and variable values holding at a point of time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignalValue {
    pub props: BTreeSet<String>,
    pub vars: Vec<i64>,
}

impl SignalValue {
    pub fn of(net: &Network, cfg: &Configuration) -> Self {
        let props = net
            .automata
            .iter()
            .zip(&cfg.locations)
            .flat_map(|(a, q)| a.locations[q.0].labels.iter().cloned())
            .collect();
        SignalValue {
            props,
            vars: cfg.vars.clone(),
        }
    }
}

/// A maximal stretch of constant value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub start: Rational,
    pub end: Rational,
    pub left_closed: bool,
    pub right_closed: bool,
    pub value: SignalValue,
}

impl Interval {
    pub fn is_point(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, t: &Rational) -> bool {
        let after = if self.left_closed {
            *t >= self.start
        } else {
            *t > self.start
        };
        let before = if self.right_closed {
            *t <= self.end
        } else {
            *t < self.end
        };
        after && before
    }
}

/// Piecewise-constant view of a trace over `[0, horizon)`, with the part
/// from `loop_time` on repeating forever.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub intervals: Vec<Interval>,
    pub horizon: Rational,
    pub loop_time: Rational,
}

impl Signal {
    /// The value at time `t` (within the horizon).
    pub fn at(&self, t: &Rational) -> Option<&SignalValue> {
        self.intervals
            .iter()
            .find(|i| i.contains(t))
            .map(|i| &i.value)
    }

    /// Checks that the intervals tile `[0, horizon)` with complementary
    /// closedness at every shared endpoint.
    pub fn is_partition(&self) -> bool {
        let Some(first) = self.intervals.first() else {
            return false;
        };
        let Some(last) = self.intervals.last() else {
            return false;
        };
        if !first.start.eq(&Rational::from_integer(0.into())) || !first.left_closed {
            return false;
        }
        if last.end != self.horizon || last.right_closed {
            return false;
        }
        self.intervals
            .iter()
            .all(|i| i.start < i.end || (i.is_point() && i.left_closed && i.right_closed))
            && self
                .intervals
                .windows(2)
                .all(|w| w[0].end == w[1].start && w[0].right_closed != w[1].left_closed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignalError {
    #[error("variable #{var} is written with both edges at position {position}")]
    MixedWriters { var: usize, position: usize },
    #[error("trace is malformed: {0}")]
    Malformed(String),
}

/// Projects a validated trace onto a signal. At each firing instant every
/// automaton contributes its old location labels (idle or `](`) or its new
/// ones (`)[`); a variable takes its new value exactly when a `)[` transition
/// writes it.
pub fn project_signal(tr: &LassoTrace, net: &Network) -> Result<Signal, SignalError> {
    if tr.configurations.len() != tr.k + 2
        || tr.transitions.len() != tr.k + 1
        || tr.delays.len() != tr.k + 1
    {
        return Err(SignalError::Malformed(format!(
            "rows do not match k = {}",
            tr.k
        )));
    }
    let times = tr.times();
    let horizon = times[tr.k + 1].clone();
    let mut intervals = Vec::new();
    let mut start = Rational::from_integer(0.into());
    let mut left_closed = true;
    let mut current = SignalValue::of(net, &tr.configurations[0]);

    // The firing at `k` sits on the horizon and belongs to the repetition.
    for l in 0..tr.k {
        if tr.is_delay_only(l) {
            continue;
        }
        let instant = times[l + 1].clone();
        let old = &tr.configurations[l];
        let new = &tr.configurations[l + 1];
        let mut props = BTreeSet::new();
        let mut any_lc = false;
        let mut all_rc = true;
        for (i, t) in tr.transitions[l].iter().enumerate() {
            let edge = match t {
                TransitionRef::Null(_) => Edge::RightClosed,
                TransitionRef::Declared(_) => tr.edges[l][i],
            };
            if edge == Edge::LeftClosed {
                any_lc = true;
                all_rc = false;
            }
            let q = if edge == Edge::LeftClosed {
                new.locations[i]
            } else {
                old.locations[i]
            };
            props.extend(net.automata[i].locations[q.0].labels.iter().cloned());
        }
        let mut vars = old.vars.clone();
        for n in 0..net.vars.len() {
            let mut lc = false;
            let mut rc = false;
            for (i, t) in tr.transitions[l].iter().enumerate() {
                if let TransitionRef::Declared(h) = t {
                    if net.automata[i].transitions[*h].writes(VarId(n)) {
                        match tr.edges[l][i] {
                            Edge::LeftClosed => lc = true,
                            Edge::RightClosed => rc = true,
                        }
                    }
                }
            }
            if lc && rc {
                return Err(SignalError::MixedWriters {
                    var: n,
                    position: l,
                });
            }
            if lc {
                vars[n] = new.vars[n];
            }
        }
        let at_instant = SignalValue { props, vars };
        let before = SignalValue::of(net, old);
        let after = SignalValue::of(net, new);
        let keep_old = at_instant == before && (at_instant != after || all_rc);
        if keep_old {
            intervals.push(Interval {
                start: start.clone(),
                end: instant.clone(),
                left_closed,
                right_closed: true,
                value: current,
            });
            left_closed = false;
        } else if at_instant == after {
            debug_assert!(any_lc || at_instant == before);
            intervals.push(Interval {
                start: start.clone(),
                end: instant.clone(),
                left_closed,
                right_closed: false,
                value: current,
            });
            left_closed = true;
        } else {
            intervals.push(Interval {
                start: start.clone(),
                end: instant.clone(),
                left_closed,
                right_closed: false,
                value: current,
            });
            intervals.push(Interval {
                start: instant.clone(),
                end: instant.clone(),
                left_closed: true,
                right_closed: true,
                value: at_instant,
            });
            left_closed = false;
        }
        start = instant;
        current = after;
    }
    intervals.push(Interval {
        start,
        end: horizon.clone(),
        left_closed,
        right_closed: false,
        value: current,
    });
    Ok(Signal {
        intervals,
        horizon,
        loop_time: times[tr.loop_index].clone(),
    })
}

pub(super) struct DisplaySignal<'a>(pub &'a Network, pub &'a Signal);

impl fmt::Display for DisplaySignal<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (net, sig) = (self.0, self.1);
        let single = sig.intervals.len() == 1;
        for iv in &sig.intervals {
            let end = if single {
                "inf".to_string()
            } else {
                iv.end.to_string()
            };
            write!(
                f,
                "{}{}, {}{}",
                if iv.left_closed { '[' } else { '(' },
                iv.start,
                end,
                if iv.right_closed { ']' } else { ')' }
            )?;
            let props: Vec<_> = iv.value.props.iter().map(String::as_str).collect();
            write!(f, "  {{{}}}", props.join(", "))?;
            for (n, v) in iv.value.vars.iter().enumerate() {
                write!(f, " {}={}", net.vars[n].name, v)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}
