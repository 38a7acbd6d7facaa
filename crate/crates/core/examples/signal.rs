//! Projects a lasso run onto a piecewise-constant signal over dense time.
//!
//! cargo run --example signal

use tabmc::check::check;
use tabmc::encoder::{EdgePolicy, EncodeOptions, Liveness};
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;
use tabmc::trace::{format_signal, format_table, project_signal, to_json};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_network(include_str!("../models/three_loc.ta"))?.network;
    let query = parse_query("reachable A.q1 && n = 1", &net)?;
    let opts = EncodeOptions {
        edges: EdgePolicy::Free,
        liveness: Liveness::Strong,
    };
    let report = check(&net, &query, 7, opts, &SolverConfig::from_env())?;
    let Some(trace) = &report.trace else {
        println!("{}", report.summary());
        return Ok(());
    };
    print!("{}", format_table(trace, &net));
    let signal = project_signal(trace, &net)?;
    print!("{}", format_signal(&net, &signal));
    println!("{}", serde_json::to_string_pretty(&to_json(trace, &net))?);
    Ok(())
}
