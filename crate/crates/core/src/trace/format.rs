use std::fmt::Write as _;

use serde_json::{json, Map, Value};

use super::signal::DisplaySignal;
use super::{location_name, LassoTrace, Signal};
use crate::encoder::TransitionRef;
use crate::ta::Network;

fn edge_text(tr: &LassoTrace, l: usize, i: usize) -> &'static str {
    match tr.transitions[l][i] {
        TransitionRef::Null(_) => ".",
        TransitionRef::Declared(_) => match tr.edges[l][i] {
            crate::ta::Edge::LeftClosed => ")[",
            crate::ta::Edge::RightClosed => "](",
        },
    }
}

/// Text table with one column per position and rows for time, delay,
/// locations (`p`), transitions (`t`), edges, variables and clocks. The
/// loop position is marked with `*`.
pub fn format_table(tr: &LassoTrace, net: &Network) -> String {
    let positions = tr.k + 2;
    let times = tr.times();
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    rows.push((
        "l".into(),
        (0..positions)
            .map(|l| {
                if l == tr.loop_index {
                    format!("{l}*")
                } else {
                    l.to_string()
                }
            })
            .collect(),
    ));
    rows.push(("time".into(), times.iter().map(|t| t.to_string()).collect()));
    let at_step = |f: &dyn Fn(usize) -> String| -> Vec<String> {
        (0..positions)
            .map(|l| if l <= tr.k { f(l) } else { String::new() })
            .collect()
    };
    rows.push(("delta".into(), at_step(&|l| tr.delays[l].to_string())));
    for (i, a) in net.automata.iter().enumerate() {
        rows.push((
            format!("p[{}]", a.name),
            tr.configurations
                .iter()
                .map(|c| location_name(net, i, c.locations[i]).to_string())
                .collect(),
        ));
        rows.push((
            format!("t[{}]", a.name),
            at_step(&|l| tr.transition_name(net, l, i).to_string()),
        ));
        rows.push((
            format!("edge[{}]", a.name),
            at_step(&|l| edge_text(tr, l, i).to_string()),
        ));
    }
    for (n, v) in net.vars.iter().enumerate() {
        rows.push((
            v.name.clone(),
            tr.configurations
                .iter()
                .map(|c| c.vars[n].to_string())
                .collect(),
        ));
    }
    for (x, name) in net.clocks.iter().enumerate() {
        rows.push((
            name.clone(),
            tr.configurations
                .iter()
                .map(|c| c.clocks[x].to_string())
                .collect(),
        ));
    }

    let head = rows
        .iter()
        .map(|(h, _)| h.chars().count())
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = (0..positions)
        .map(|l| {
            rows.iter()
                .map(|(_, cells)| cells[l].chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (h, cells) in &rows {
        let _ = write!(out, "{h:>head$} =");
        for (cell, w) in cells.iter().zip(&widths) {
            let _ = write!(out, " {cell:>w$}");
        }
        out.truncate(out.trim_end().len());
        out.push('\n');
    }
    out
}

/// Structured form with the fields `positions`, `loop`, `delta`,
/// `transitions`, `edges`, `locations`, `vars` and `clocks`. Per-automaton
/// and per-variable rows are keyed by name; rationals are strings such as
/// `"3/2"`.
pub fn to_json(tr: &LassoTrace, net: &Network) -> Value {
    let steps = 0..=tr.k;
    let mut transitions = Map::new();
    let mut edges = Map::new();
    let mut locations = Map::new();
    for (i, a) in net.automata.iter().enumerate() {
        transitions.insert(
            a.name.clone(),
            steps
                .clone()
                .map(|l| Value::from(tr.transition_name(net, l, i)))
                .collect(),
        );
        edges.insert(
            a.name.clone(),
            steps
                .clone()
                .map(|l| match edge_text(tr, l, i) {
                    "." => Value::Null,
                    e => Value::from(e),
                })
                .collect(),
        );
        locations.insert(
            a.name.clone(),
            tr.configurations
                .iter()
                .map(|c| Value::from(location_name(net, i, c.locations[i])))
                .collect(),
        );
    }
    let mut vars = Map::new();
    for (n, v) in net.vars.iter().enumerate() {
        vars.insert(
            v.name.clone(),
            tr.configurations
                .iter()
                .map(|c| Value::from(c.vars[n]))
                .collect(),
        );
    }
    let mut clocks = Map::new();
    for (x, name) in net.clocks.iter().enumerate() {
        clocks.insert(
            name.clone(),
            tr.configurations
                .iter()
                .map(|c| Value::from(c.clocks[x].to_string()))
                .collect(),
        );
    }
    json!({
        "positions": tr.k + 2,
        "loop": tr.loop_index,
        "delta": tr.delays.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "transitions": transitions,
        "edges": edges,
        "locations": locations,
        "vars": vars,
        "clocks": clocks,
    })
}

/// One line per interval: bounds with their brackets, labels, variables.
pub fn format_signal(net: &Network, signal: &Signal) -> String {
    DisplaySignal(net, signal).to_string()
}
