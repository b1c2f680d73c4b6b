//! Joins two synthetic layers through the grid index at several radii and
//! compares the pair counts and timing with a brute-force scan.
//!
//! cargo run --release --example spatial_join -- [samples_per_type]

use std::time::Instant;

use geoprobe::algorithms::min_distance;
use geoprobe::dataset::{generate_synthetic, BuilderConfig};
use geoprobe::index::join_pairs;

fn main() {
    let samples = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("samples_per_type must be an integer"))
        .unwrap_or(300);
    let layer = |seed| {
        generate_synthetic(&BuilderConfig {
            samples_per_type: samples,
            seed,
            ..Default::default()
        })
        .expect("generate")
    };
    let (a, b) = (layer(1), layer(2));
    println!("{} x {} geometries", a.len(), b.len());
    for r in [0.0, 0.001, 0.003] {
        let t = Instant::now();
        let joined = join_pairs(&a, &b, r).len();
        let indexed = t.elapsed();
        let t = Instant::now();
        let brute = a
            .iter()
            .flat_map(|s| b.iter().map(move |o| (s, o)))
            .filter(|(s, o)| min_distance(&s.geometry, &o.geometry) <= r)
            .count();
        println!(
            "r={r:<6} index {joined:>6} pairs in {indexed:>10.2?}   brute force {brute:>6} in {:>10.2?}",
            t.elapsed()
        );
    }
}
