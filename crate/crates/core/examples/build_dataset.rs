//! Generates a synthetic city and prints candidate and kept relation counts.
//!
//! cargo run --example build_dataset -- [samples_per_type]

use geoprobe::dataset::{
    build_location_queries_from, build_relation_triplets_from, discover_relations,
    generate_synthetic, BuilderConfig,
};

fn main() {
    let samples = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("samples_per_type must be an integer"))
        .unwrap_or(1000);
    let cfg = BuilderConfig {
        samples_per_type: samples,
        ..Default::default()
    };
    let records = generate_synthetic(&cfg).expect("generate");
    println!("{} records", records.len());

    let candidates = discover_relations(&records, &cfg);
    println!("candidate pairs per label:");
    for (label, n) in candidates.label_counts() {
        println!("  {label:<18} {n}");
    }
    println!("skipped degenerate pairs: {}", candidates.degenerate_pairs);

    let triplets = build_relation_triplets_from(&records, &candidates, &cfg);
    println!("kept triplets per category:");
    for (cat, n) in &triplets.counts {
        println!("  {cat:<32} {n}");
    }

    let queries = build_location_queries_from(&records, &candidates, &cfg);
    println!("location queries per category:");
    for (cat, n) in &queries.counts {
        println!("  {cat:<28} {n}");
    }
}
