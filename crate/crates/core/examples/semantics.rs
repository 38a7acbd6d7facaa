//! Checks a run against the executable semantics, then breaks it in a few
//! ways and prints the clauses that fail.
//!
//! cargo run --example semantics

use tabmc::check::check;
use tabmc::encoder::{EdgePolicy, EncodeOptions, Liveness};
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;
use tabmc::ta::{eval_clock_constraint, ClockConstraint, ClockId, ClockRel, Rational, SatMode};
use tabmc::trace::{format_table, validate_trace};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // `x < 2` on its bound: strictly false, weakly true.
    let c = ClockConstraint::top().and(ClockId(0), ClockRel::Lt, 2);
    let two = [Rational::from_integer(2.into())];
    println!(
        "x = 2 against x < 2: strict {}, weak {}",
        eval_clock_constraint(&two, &c, SatMode::Strict)?,
        eval_clock_constraint(&two, &c, SatMode::Weak)?
    );

    let net = parse_network(include_str!("../models/three_loc.ta"))?.network;
    let query = parse_query("reachable A.q1 && n = 1", &net)?;
    let opts = EncodeOptions {
        edges: EdgePolicy::Free,
        liveness: Liveness::Strong,
    };
    let report = check(&net, &query, 7, opts, &SolverConfig::from_env())?;
    let Some(trace) = report.trace else {
        println!("{}", report.summary());
        return Ok(());
    };
    print!("{}", format_table(&trace, &net));
    println!("valid: {}", validate_trace(&trace, &net).is_ok());

    let mut slow = trace.clone();
    for d in &mut slow.delays {
        *d *= Rational::from_integer(3.into());
    }
    report_violations("all delays tripled", &slow, &net);

    let mut moved = trace.clone();
    moved.configurations[1].vars[0] = 1;
    report_violations("n changed at position 1", &moved, &net);

    let mut open = trace;
    open.loop_index = 0;
    report_violations("loop moved to position 0", &open, &net);
    Ok(())
}

fn report_violations(what: &str, tr: &tabmc::trace::LassoTrace, net: &tabmc::ta::Network) {
    println!("\n{what}:");
    match validate_trace(tr, net) {
        Ok(()) => println!("  still valid"),
        Err(vs) => {
            for v in vs {
                println!("  {v}");
            }
        }
    }
}
