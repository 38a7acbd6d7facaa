use std::fmt::Write as _;

use crate::ta::{ClockConstraint, Expr, Network, SyncLabel, VarConstraint, VarOperand, VarRel};

fn clock_constraint(net: &Network, c: &ClockConstraint) -> String {
    c.atoms
        .iter()
        .map(|a| format!("{} {} {}", net.clocks[a.clock.0], a.rel.symbol(), a.bound))
        .collect::<Vec<_>>()
        .join(" and ")
}

fn var_constraint(net: &Network, c: &VarConstraint, out: &mut String) {
    match c {
        VarConstraint::True => out.push_str("true"),
        VarConstraint::Atom { lhs, rel, rhs } => {
            let rel = match rel {
                VarRel::Lt => "<",
                VarRel::Eq => "=",
            };
            let rhs = match rhs {
                VarOperand::Var(v) => net.vars[v.0].name.clone(),
                VarOperand::Const(c) => c.to_string(),
            };
            let _ = write!(out, "{} {rel} {rhs}", net.vars[lhs.0].name);
        }
        VarConstraint::Not(a) => {
            out.push_str("not (");
            var_constraint(net, a, out);
            out.push(')');
        }
        VarConstraint::And(a, b) => {
            out.push('(');
            var_constraint(net, a, out);
            out.push_str(" and ");
            var_constraint(net, b, out);
            out.push(')');
        }
    }
}

fn expr(net: &Network, e: &Expr, out: &mut String) {
    match e {
        Expr::Const(c) => {
            let _ = write!(out, "{c}");
        }
        Expr::Var(v) => out.push_str(&net.vars[v.0].name),
        Expr::Add(a, b) | Expr::Sub(a, b) => {
            expr(net, a, out);
            out.push_str(if matches!(e, Expr::Add(..)) {
                " + "
            } else {
                " - "
            });
            let nested = matches!(**b, Expr::Add(..) | Expr::Sub(..));
            if nested {
                out.push('(');
            }
            expr(net, b, out);
            if nested {
                out.push(')');
            }
        }
    }
}

/// Renders a variable constraint in model syntax.
pub fn format_var_constraint(net: &Network, c: &VarConstraint) -> String {
    let mut s = String::new();
    var_constraint(net, c, &mut s);
    s
}

/// Renders a clock constraint in model syntax; `true` when empty.
pub fn format_clock_constraint(net: &Network, c: &ClockConstraint) -> String {
    if c.is_top() {
        "true".to_string()
    } else {
        clock_constraint(net, c)
    }
}

pub fn format_expr(net: &Network, e: &Expr) -> String {
    let mut s = String::new();
    expr(net, e, &mut s);
    s
}

/// Renders `net` in the model format. Parsing the result gives back an
/// equal network.
pub fn print_network(net: &Network) -> String {
    let mut out = String::new();
    for c in &net.clocks {
        let _ = writeln!(out, "clock {c};");
    }
    for v in &net.vars {
        let _ = writeln!(out, "var {} : [{}, {}] = {};", v.name, v.lo, v.hi, v.init);
    }
    for c in &net.channels {
        let _ = writeln!(out, "channel {c};");
    }
    for a in &net.automata {
        let _ = writeln!(out, "\nautomaton {} {{", a.name);
        if let Some(q0) = a.locations.first() {
            let _ = writeln!(out, "  init {};", q0.name);
        }
        for l in &a.locations {
            let _ = write!(out, "  location {}", l.name);
            if !l.invariant.is_top() {
                let _ = write!(out, " inv {}", clock_constraint(net, &l.invariant));
            }
            if !l.labels.is_empty() {
                let labels: Vec<_> = l.labels.iter().map(String::as_str).collect();
                let _ = write!(out, " labels {{{}}}", labels.join(", "));
            }
            out.push_str(";\n");
        }
        for t in &a.transitions {
            let _ = write!(
                out,
                "  trans {}: {} -> {}",
                t.name, a.locations[t.source.0].name, a.locations[t.target.0].name
            );
            let mut guard = Vec::new();
            if !t.clock_guard.is_top() {
                guard.push(clock_constraint(net, &t.clock_guard));
            }
            if !t.var_guard.is_true() {
                let mut s = String::from("(");
                var_constraint(net, &t.var_guard, &mut s);
                s.push(')');
                guard.push(s);
            }
            if !guard.is_empty() {
                let _ = write!(out, " when {}", guard.join(" and "));
            }
            if let SyncLabel::Channel { channel, kind } = t.sync {
                let _ = write!(out, " sync {}{}", net.channels[channel.0], kind.symbol());
            }
            if !t.resets.is_empty() {
                let names: Vec<_> = t.resets.iter().map(|c| net.clocks[c.0].as_str()).collect();
                let _ = write!(out, " reset {{{}}}", names.join(", "));
            }
            if !t.assignments.is_empty() {
                let parts: Vec<_> = t
                    .assignments
                    .iter()
                    .map(|a| {
                        format!(
                            "{} := {}",
                            net.vars[a.target.0].name,
                            format_expr(net, &a.expr)
                        )
                    })
                    .collect();
                let _ = write!(out, " do {{{}}}", parts.join(", "));
            }
            out.push_str(";\n");
        }
        out.push_str("}\n");
    }
    out
}
