//! Prints the DE-9IM matrix, the named predicates and the measures for a
//! few pairs, or for two WKT arguments.
//!
//! cargo run --example de9im_relations -- "POINT (1 1)" "POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))"

use geoprobe::algorithms::{
    area, centroid, classify_relation, de9im, min_distance, named_predicates,
};
use geoprobe::geometry::parse_wkt;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let pairs: Vec<(String, String)> = if args.len() == 2 {
        vec![(args[0].clone(), args[1].clone())]
    } else {
        [
            ("POINT (1 1)", "POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))"),
            ("POINT (2 1)", "POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))"),
            (
                "LINESTRING (-1 1, 3 1)",
                "POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))",
            ),
            (
                "POLYGON ((1 1, 3 1, 3 3, 1 3, 1 1))",
                "POLYGON ((0 0, 2 0, 2 2, 0 2, 0 0))",
            ),
            ("LINESTRING (0 0, 2 2)", "LINESTRING (0 2, 2 0)"),
            ("POINT (5 5)", "LINESTRING (0 0, 2 0)"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect()
    };
    for (a, b) in pairs {
        let (ga, gb) = match (parse_wkt(&a), parse_wkt(&b)) {
            (Ok(ga), Ok(gb)) => (ga, gb),
            (Err(e), _) | (_, Err(e)) => {
                eprintln!("invalid WKT: {e}");
                std::process::exit(1);
            }
        };
        let m = de9im(&ga, &gb).expect("relate");
        let names: Vec<String> = named_predicates(&m, ga.kind(), gb.kind())
            .iter()
            .map(|p| p.to_string())
            .collect();
        println!("{a}\n{b}");
        println!(
            "  matrix {m}  label {}",
            classify_relation(&ga, &gb).expect("classify")
        );
        println!("  predicates {}", names.join(", "));
        let c = centroid(&ga).expect("centroid");
        println!(
            "  area {} centroid ({}, {}) distance {}\n",
            area(&ga).expect("area"),
            c.x,
            c.y,
            min_distance(&ga, &gb)
        );
    }
}
