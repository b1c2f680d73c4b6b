mod common;

use geoprobe::encoding::EmbeddingVector;
use geoprobe::eval::{run_t6, Embeddings, Similarity};

use common::retrieval::{duplicate_pool_precision, query, random_pool_precision};

#[test]
fn duplicated_answers_give_exact_precision() {
    let (got, expected) = duplicate_pool_precision(1);
    assert_eq!(got, expected);
}

#[test]
fn random_pool_is_near_chance() {
    let p = random_pool_precision(2);
    assert!(p < 0.05, "{p}");
}

#[test]
fn three_query_fixture_by_hand() {
    let v = |x: f32, y: f32| EmbeddingVector::new(vec![x, y]);
    let mut emb = Embeddings::new();
    // pool on the unit circle at increasing angles
    for (id, x, y) in [
        ("a", 1.0, 0.0),
        ("b", 0.9, 0.1),
        ("c", 0.5, 0.5),
        ("d", 0.1, 0.9),
        ("e", 0.0, 1.0),
        ("f", -1.0, 0.0),
    ] {
        emb.insert(id.into(), v(x, y));
    }
    let q1 = query("o1", vec!["a".into(), "b".into()]);
    let q2 = query("o2", vec!["e".into(), "f".into()]);
    let q3 = query("o3", vec!["c".into()]);
    emb.insert(q1.phrase_id(), v(1.0, 0.0));
    emb.insert(q2.phrase_id(), v(0.0, 1.0));
    emb.insert(q3.phrase_id(), v(-1.0, 0.0));
    // top-2: q1 -> a, b (2/2); q2 -> e, d (1/2); q3 -> f, e (0/2)
    let r = run_t6(&[q1, q2, q3], &emb, 2, Similarity::Cosine, "fixture").unwrap();
    assert_eq!(r.test.unwrap(), (1.0 + 0.5 + 0.0) / 3.0);
    assert!(r.validation.is_none());
}

#[test]
fn ties_resolve_by_ascending_id() {
    let mut emb = Embeddings::new();
    for id in ["z", "m", "a"] {
        emb.insert(id.into(), EmbeddingVector::new(vec![1.0, 1.0]));
    }
    let q = query("o", vec!["a".into()]);
    emb.insert(q.phrase_id(), EmbeddingVector::new(vec![1.0, 1.0]));
    let also = query("p", vec!["m".into(), "z".into()]);
    emb.insert(also.phrase_id(), EmbeddingVector::new(vec![1.0, 1.0]));
    let r = run_t6(&[q, also], &emb, 1, Similarity::Cosine, "fixture").unwrap();
    // both queries retrieve "a" first
    assert_eq!(r.test.unwrap(), 0.5);
}
