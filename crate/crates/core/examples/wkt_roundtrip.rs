//! Parses WKT from the command line (or a few built-in strings), prints the
//! canonical form and reports rejected input.
//!
//! cargo run --example wkt_roundtrip -- "POLYGON ((0 0, 4 0, 4 4, 0 4, 0 0))"

use geoprobe::geometry::{format_wkt, parse_wkt};

fn main() {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = [
            "point(-89.4012 43.0731)",
            "LINESTRING (30 10, 10 30, 40 40)",
            "POLYGON ((35 10, 45 45, 15 40, 10 20, 35 10), (20 30, 35 35, 30 20, 20 30))",
            "POLYGON ((0 0, 1 0, 1 1, 0 0)",
            "POINT Z (1 2 3)",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
    }
    for text in &inputs {
        match parse_wkt(text) {
            Ok(g) => {
                let canonical = format_wkt(&g);
                let stable = parse_wkt(&canonical).map(|b| format_wkt(&b)) == Ok(canonical.clone());
                println!(
                    "{:<10} {canonical}  (stable: {stable})",
                    g.kind().to_string()
                );
            }
            Err(e) => println!("rejected   {text:?}: {e}"),
        }
    }
}
