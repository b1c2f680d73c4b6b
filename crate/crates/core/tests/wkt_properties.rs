mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use geoprobe::geometry::{format_wkt, parse_wkt, Geometry};

use common::wkt::{bases, mutations, random_geometry, same_bits};

#[test]
fn ten_thousand_geometries_round_trip_bitwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..10_000 {
        let g = random_geometry(&mut rng);
        let text = format_wkt(&g);
        let back = parse_wkt(&text).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert!(same_bits(&g, &back), "{text}");
        assert_eq!(format_wkt(&back), text);
    }
}

#[test]
fn structural_mutations_are_all_rejected() {
    let mut total = 0;
    for base in bases() {
        parse_wkt(&base).unwrap();
        for bad in mutations(&base) {
            assert_ne!(bad, base);
            assert!(
                parse_wkt(&bad).is_err(),
                "accepted mutation {bad:?} of {base:?}"
            );
            total += 1;
        }
    }
    assert!(total >= 100, "only {total} mutations");
}

#[test]
fn whitespace_and_case_are_free_form() {
    let g = parse_wkt("  polygon((0 0,1 0 , 1 1,0 0))\n").unwrap();
    assert_eq!(format_wkt(&g), "POLYGON ((0 0, 1 0, 1 1, 0 0))");
}

proptest! {
    #[test]
    fn point_text_round_trips(x in -1e9f64..1e9, y in -1e9f64..1e9) {
        let g = Geometry::point(x, y).unwrap();
        let back = parse_wkt(&format_wkt(&g)).unwrap();
        prop_assert!(same_bits(&g, &back));
    }

    #[test]
    fn parser_never_panics(s in "[A-Z ()0-9.,eE+-]{0,40}") {
        let _ = parse_wkt(&s);
    }
}
