//! Token exclusivity in a ring of agents coordinated by channel handshakes.
//!
//! cargo run --example token_ring -- [agents] [bound]

use tabmc::bench::{gen_token_ring, token_ring_query};
use tabmc::check::check;
use tabmc::encoder::EncodeOptions;
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;
use tabmc::trace::format_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(3);
    let k: usize = args.next().map(|a| a.parse()).transpose()?.unwrap_or(10);
    let solver = SolverConfig::from_env();
    let net = parse_network(&gen_token_ring(n)?)?.network;

    // A full round of the ring is a lasso; show one.
    let witness = parse_query(&format!("reachable Agent{n}.hold"), &net)?;
    let report = check(&net, &witness, k, EncodeOptions::default(), &solver)?;
    println!("{}", report.summary());
    if let Some(trace) = &report.trace {
        print!("{}", format_table(trace, &net));
    }

    let query = parse_query(token_ring_query(), &net)?;
    let report = check(&net, &query, k, EncodeOptions::default(), &solver)?;
    println!(
        "{}: {} [encode {:?}, solve {:?}]",
        token_ring_query(),
        report.summary(),
        report.encode_time,
        report.solve_time
    );
    Ok(())
}
