//! Mutual exclusion in Fischer's protocol, and a counterexample once the
//! `id` recheck is removed.
//!
//! cargo run --example fischer -- [processes] [bound]

use std::time::Instant;

use tabmc::bench::{fischer_queries, gen_fischer, FischerVariant};
use tabmc::check::check;
use tabmc::encoder::EncodeOptions;
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;
use tabmc::trace::format_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(2);
    let k: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(10);
    let solver = SolverConfig::from_env();

    for variant in [FischerVariant::Correct, FischerVariant::NoRecheck] {
        let net = parse_network(&gen_fischer(n, variant)?)?.network;
        let query = parse_query(&fischer_queries(n)[0], &net)?;
        let started = Instant::now();
        let report = check(&net, &query, k, EncodeOptions::default(), &solver)?;
        println!(
            "{variant:?}: {} [{} assertions, encode {:?}, solve {:?}, total {:?}]",
            report.summary(),
            report.assertions,
            report.encode_time,
            report.solve_time,
            started.elapsed()
        );
        if let Some(trace) = &report.trace {
            print!("{}", format_table(trace, &net));
        }
    }
    Ok(())
}
