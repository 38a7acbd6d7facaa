//! Parsing, pretty-printing and diagnostics for the model language.
//!
//! cargo run --example model_format -- [file.ta]

use tabmc::model::{parse_file, parse_network, print_network};

const BROKEN: &str = "
clock x;
var n : [0, 3] = 7;
automaton A {
  init q0;
  location q0 inv x <= 2;
  trans t: q0 -> q9 when y > 1;
}
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let parsed = match std::env::args().nth(1) {
        Some(path) => parse_file(path.as_ref())?,
        None => parse_network(include_str!("../models/three_loc.ta"))?,
    };
    for w in &parsed.warnings {
        println!("warning: {w}");
    }
    print!("{}", print_network(&parsed.network));

    println!("\n-- a broken model --");
    match parse_network(BROKEN) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(diags) => print!("{diags}"),
    }
    Ok(())
}
