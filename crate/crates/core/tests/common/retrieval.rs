//! T6 retrieval fixtures with known precision.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use geoprobe::algorithms::{PredicateName, RelationLabel};
use geoprobe::dataset::LocationQuery;
use geoprobe::encoding::EmbeddingVector;
use geoprobe::eval::{run_t6, Embeddings, Similarity};
use geoprobe::geometry::GeometryKind;

pub fn gaussian(rng: &mut ChaCha8Rng, dim: usize) -> EmbeddingVector {
    EmbeddingVector::new(
        (0..dim)
            .map(|_| rng.sample::<f32, _>(StandardNormal))
            .collect(),
    )
}

pub fn query(object: &str, answers: Vec<String>) -> LocationQuery {
    let mut answers = answers;
    answers.sort();
    LocationQuery {
        object_id: object.to_string(),
        object_kind: GeometryKind::Polygon,
        predicate: RelationLabel::Named(PredicateName::Within),
        answers,
    }
}

/// Answer vectors are exact copies of their query's phrase vector.
pub fn duplicate_pool_precision(seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut emb = Embeddings::new();
    let mut queries = Vec::new();
    let mut expected = 0.0;
    for q in 0..40 {
        let size = 1 + q % 9;
        let v = gaussian(&mut rng, 64);
        let answers: Vec<String> = (0..size).map(|i| format!("s{q:03}_{i}")).collect();
        for a in &answers {
            emb.insert(a.clone(), v.clone());
        }
        let lq = query(&format!("o{q:03}"), answers);
        emb.insert(lq.phrase_id(), v);
        expected += size.min(5) as f64 / 5.0;
        queries.push(lq);
    }
    let report = run_t6(&queries, &emb, 5, Similarity::Cosine, "fixture").unwrap();
    (report.test.unwrap(), expected / queries.len() as f64)
}

/// 1,000 random Gaussian subjects, 6 relevant per query.
pub fn random_pool_precision(seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = 256;
    let subjects: Vec<String> = (0..1000).map(|i| format!("s{i:04}")).collect();
    let mut emb = Embeddings::new();
    for s in &subjects {
        emb.insert(s.clone(), gaussian(&mut rng, dim));
    }
    let mut shuffled = subjects.clone();
    shuffled.shuffle(&mut rng);
    let mut queries = Vec::new();
    for (q, chunk) in shuffled.chunks(6).enumerate() {
        let mut answers = chunk.to_vec();
        while answers.len() < 6 {
            let extra = subjects[rng.random_range(0..subjects.len())].clone();
            if !answers.contains(&extra) {
                answers.push(extra);
            }
        }
        let lq = query(&format!("o{q:04}"), answers);
        emb.insert(lq.phrase_id(), gaussian(&mut rng, dim));
        queries.push(lq);
    }
    let report = run_t6(&queries, &emb, 5, Similarity::Cosine, "fixture").unwrap();
    assert_eq!(report.metadata["pool_size"], 1000);
    report.test.unwrap()
}
