//! Builds location queries over a synthetic city, embeds subjects and
//! relation phrases with the reference encoder and reports Precision@k.
//!
//! cargo run --release --example t6_retrieval -- [samples_per_type] [k]

use std::collections::HashMap;

use geoprobe::dataset::{build_location_queries, generate_synthetic, BuilderConfig};
use geoprobe::encoding::{CachedEncoder, Encoder, RelationPhrase};
use geoprobe::eval::{run_t6, Similarity};

fn main() {
    let mut args = std::env::args().skip(1);
    let samples = args
        .next()
        .map(|s| s.parse().expect("integer"))
        .unwrap_or(500);
    let k = args
        .next()
        .map(|s| s.parse().expect("integer"))
        .unwrap_or(5);
    let cfg = BuilderConfig {
        samples_per_type: samples,
        ..Default::default()
    };
    let records = generate_synthetic(&cfg).expect("generate");
    let queries = build_location_queries(&records, &cfg)
        .expect("queries")
        .queries;
    let by_id: HashMap<_, _> = records.iter().map(|r| (r.id.as_str(), r)).collect();

    let mut items: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.id.clone(), r.geometry.to_wkt()))
        .collect();
    for q in &queries {
        let phrase = RelationPhrase::new(q.predicate, &by_id[q.object_id.as_str()].geometry);
        items.push((q.phrase_id(), phrase.render()));
    }
    let enc = CachedEncoder::new(Encoder::reference(768, 42));
    let vectors = enc.encode_items(&items).expect("encode");
    let emb = items.into_iter().map(|(id, _)| id).zip(vectors).collect();

    for similarity in [Similarity::Cosine, Similarity::Euclidean] {
        let r = run_t6(&queries, &emb, k, similarity, "reference").expect("t6");
        println!(
            "{similarity:?}: {} queries, pool {}, mean P@{k} {:.4}",
            queries.len(),
            r.metadata["pool_size"],
            r.test.unwrap()
        );
    }
}
