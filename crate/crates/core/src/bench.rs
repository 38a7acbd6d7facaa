//! Generators for the scalable benchmark models, in model-file syntax.
//!
//! Fischer's protocol: process `Pi` moves `a -> b` when `id = 0`, must write
//! `id := i` within 1 time unit (`b -> c`), then waits more than 2 time
//! units and enters `cs` only if `id` still equals `i`. Leaving `cs` clears
//! `id`; a process in `c` that sees `id = 0` again retries from `b`.
//!
//! Token ring: a ring automaton hands the token to agent `i` on channel
//! `take_i` and gets it back on `release_i`. One clock `y`, reset on every
//! hand-off, bounds delivery (`y <= 1`) and holding time (`1 <= y <= 3`).

use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("{model} needs at least 2 processes, got {n}")]
    TooFew { model: &'static str, n: usize },
}

/// Fischer variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FischerVariant {
    #[default]
    Correct,
    /// The `id = i` recheck before `cs` is dropped.
    NoRecheck,
}

/// Upper bound on the time between `a -> b` and writing `id`.
pub const FISCHER_WRITE_DELAY: u32 = 1;
/// Lower bound on the wait in `c` before entering `cs`.
pub const FISCHER_WAIT_DELAY: u32 = 2;

pub fn gen_fischer(n: usize, variant: FischerVariant) -> Result<String, BenchError> {
    if n < 2 {
        return Err(BenchError::TooFew {
            model: "fischer",
            n,
        });
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "// Fischer's mutual exclusion protocol, {n} processes."
    );
    if variant == FischerVariant::NoRecheck {
        let _ = writeln!(out, "// Broken: `c -> cs` does not recheck `id`.");
    }
    for q in fischer_queries(n) {
        let _ = writeln!(out, "// check: {q}");
    }
    let clocks: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let _ = writeln!(out, "\nclock {};", clocks.join(", "));
    let _ = writeln!(out, "var id : [0, {n}] = 0;");
    for i in 1..=n {
        let x = format!("x{i}");
        let recheck = match variant {
            FischerVariant::Correct => format!(" and id = {i}"),
            FischerVariant::NoRecheck => String::new(),
        };
        let _ = write!(
            out,
            "
automaton P{i} {{
  init a;
  location a;
  location b inv {x} <= {FISCHER_WRITE_DELAY};
  location c;
  location cs labels {{critical}};
  trans request: a -> b when id = 0 reset {{{x}}};
  trans set: b -> c when {x} <= {FISCHER_WRITE_DELAY} reset {{{x}}} do {{id := {i}}};
  trans enter: c -> cs when {x} > {FISCHER_WAIT_DELAY}{recheck};
  trans retry: c -> b when id = 0 reset {{{x}}};
  trans exit: cs -> a do {{id := 0}};
}}
"
        );
    }
    Ok(out)
}

/// Pairwise mutual exclusion, one query per pair.
pub fn fischer_queries(n: usize) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            out.push(format!("invariant !(P{i}.cs && P{j}.cs)"));
        }
    }
    out
}

/// Upper bound on the time the ring takes to deliver the token.
pub const RING_DELIVERY: u32 = 1;
/// Bounds on how long an agent holds the token.
pub const RING_HOLD_MIN: u32 = 1;
pub const RING_HOLD_MAX: u32 = 3;

pub fn gen_token_ring(n: usize) -> Result<String, BenchError> {
    if n < 2 {
        return Err(BenchError::TooFew {
            model: "token ring",
            n,
        });
    }
    let mut out = String::new();
    let _ = writeln!(out, "// Token ring with {n} agents and the ring process.");
    let _ = writeln!(out, "// check: {}", token_ring_query());
    let _ = writeln!(out, "\nclock y;");
    let channels: Vec<String> = (1..=n)
        .flat_map(|i| [format!("take_{i}"), format!("release_{i}")])
        .collect();
    let _ = writeln!(out, "channel {};", channels.join(", "));
    for i in 1..=n {
        let _ = write!(
            out,
            "
automaton Agent{i} {{
  init idle;
  location idle;
  location hold inv y <= {RING_HOLD_MAX} labels {{token{i}}};
  trans take: idle -> hold sync take_{i}?;
  trans release: hold -> idle when y >= {RING_HOLD_MIN} sync release_{i}!;
}}
"
        );
    }
    let _ = writeln!(out, "\nautomaton Ring {{\n  init give1;");
    for i in 1..=n {
        let _ = writeln!(out, "  location give{i} inv y <= {RING_DELIVERY};");
        let _ = writeln!(out, "  location wait{i};");
    }
    for i in 1..=n {
        let next = i % n + 1;
        let _ = writeln!(
            out,
            "  trans hand{i}: give{i} -> wait{i} sync take_{i}! reset {{y}};"
        );
        let _ = writeln!(
            out,
            "  trans back{i}: wait{i} -> give{next} sync release_{i}? reset {{y}};"
        );
    }
    out.push_str("}\n");
    Ok(out)
}

/// Agents 1 and 2 never hold the token at the same time.
pub fn token_ring_query() -> &'static str {
    "invariant !(Agent1.hold && Agent2.hold)"
}
