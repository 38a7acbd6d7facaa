//! Builds the SMT-LIB2 encoding for a query, writes it out, and evaluates
//! its assertions in-process against a solver witness.
//!
//! cargo run --example encode -- [bound] [out.smt2]

use tabmc::check::{build_script, check};
use tabmc::encoder::{EdgePolicy, EncodeOptions, Liveness};
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;
use tabmc::term::{emit_smtlib2, DEFAULT_LOGIC};
use tabmc::trace::model_of_trace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let k: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(7);
    let out = args.next();

    let net = parse_network(include_str!("../models/three_loc.ta"))?.network;
    let query = parse_query("reachable A.q1 && n = 1", &net)?;
    let opts = EncodeOptions {
        edges: EdgePolicy::Free,
        liveness: Liveness::Strong,
    };
    let script = build_script(&net, &query, k, opts)?;
    let text = emit_smtlib2(&script, DEFAULT_LOGIC);
    println!(
        "k = {k}: {} declarations, {} definitions, {} assertions, {} bytes",
        script.declarations().count(),
        script.definitions().count(),
        script.assertions().len(),
        text.len()
    );
    match out {
        Some(path) => std::fs::write(&path, &text)?,
        None => println!("{}", text.lines().take(12).collect::<Vec<_>>().join("\n")),
    }

    let report = check(&net, &query, k, opts, &SolverConfig::from_env())?;
    println!("{}", report.summary());
    if let Some(trace) = &report.trace {
        let model = model_of_trace(trace, &net);
        let failing = script.failing_assertions(&model.lookup())?;
        println!("re-encoded witness violates {} assertions", failing.len());
    }
    Ok(())
}
