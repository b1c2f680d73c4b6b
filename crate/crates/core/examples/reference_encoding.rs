//! Embeds WKT strings with the deterministic reference encoder and prints
//! pairwise cosine similarities.
//!
//! cargo run --example reference_encoding -- [dim]

use geoprobe::algorithms::{PredicateName, RelationLabel};
use geoprobe::encoding::{Encoder, RelationPhrase};
use geoprobe::geometry::parse_wkt;

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (norm(a) * norm(b))
}

fn main() {
    let dim = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("dim must be an integer"))
        .unwrap_or(768);
    let enc = Encoder::reference(dim, 42);
    let polygon =
        parse_wkt("POLYGON ((-89.40 43.07, -89.39 43.07, -89.39 43.08, -89.40 43.07))").unwrap();
    let texts = [
        "POINT (-89.4012 43.0731)".to_string(),
        "POINT (-89.4013 43.0731)".to_string(),
        "LINESTRING (-89.40 43.07, -89.39 43.08)".to_string(),
        polygon.to_wkt(),
        RelationPhrase::new(RelationLabel::Named(PredicateName::Within), &polygon).render(),
    ];
    let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
    let vectors: Vec<Vec<f64>> = enc
        .embed_texts(&refs)
        .expect("embed")
        .iter()
        .map(|v| v.to_f64())
        .collect();
    println!("encoder {} ({} dims)", enc.handle().id(), vectors[0].len());
    for (i, t) in texts.iter().enumerate() {
        println!("[{i}] {t}");
    }
    for i in 0..vectors.len() {
        let row: Vec<String> = (0..vectors.len())
            .map(|j| format!("{:6.3}", cosine(&vectors[i], &vectors[j])))
            .collect();
        println!("[{i}] {}", row.join(" "));
    }
}
