//! Handshake and broadcast synchronization on small networks.
//!
//! cargo run --example sync

use tabmc::check::check;
use tabmc::encoder::{EdgePolicy, EncodeOptions, Liveness};
use tabmc::model::parse_network;
use tabmc::property::parse_query;
use tabmc::solver::SolverConfig;

const NET: &str = "
channel c, b;
var n : [0, 3] = 0;
automaton S { init s0; location s0; location s1; location s2;
  trans send: s0 -> s1 sync c!;
  trans shout: s1 -> s2 sync b#; }
automaton R { init r0; location r0; location r1;
  trans recv: r0 -> r1 sync c? do {n := n + 1}; }
automaton L { init l0; location l0; location l1;
  trans hear: l0 -> l1 sync b@; }
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = parse_network(NET)?.network;
    let solver = SolverConfig::from_env();
    let queries = [
        "reachable S.s1 && R.r0",
        "reachable S.s1 && R.r1 && n = 1",
        "reachable S.s2 && L.l0",
        "reachable S.s2 && L.l1",
    ];
    for edges in [EdgePolicy::RightClosed, EdgePolicy::Free] {
        let opts = EncodeOptions {
            edges,
            liveness: Liveness::None,
        };
        for q in queries {
            let query = parse_query(q, &net)?;
            let report = check(&net, &query, 4, opts, &solver)?;
            println!("{edges:?} {q}: {}", report.summary());
        }
    }
    Ok(())
}
