//! Acceptance report: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test --test acceptance`.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, UnwindSafe};
use std::path::Path;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use geoprobe::algorithms::{
    area, centroid, classify_relation, de9im, min_distance, named_predicates, PredicateName,
};
use geoprobe::dataset::{generate_synthetic, BuilderConfig, TaskId};
use geoprobe::encoding::EncoderKind;
use geoprobe::eval::Variant;
use geoprobe::geometry::{format_wkt, parse_wkt, GeometryRecord};
use geoprobe::index::{join_pairs, BBox};
use geoprobe::pipeline::{self, RunOptions};
use geoprobe::probe::{
    mean_precision_at_k, metric_accuracy, metric_mape, metric_precision_at_k, metric_rmse, train,
    Hyperparams, TargetTransform,
};

use common::pipeline_run::{run_pipeline, SMALL_CONFIG};
use common::probe::{param_bits, regression_data, worst_over_trials, worst_round_trip, LOSSES};
use common::retrieval::{duplicate_pool_precision, random_pool_precision};
use common::wkt::{bases, mutations, random_geometry, same_bits};
use common::{
    oracle_area, oracle_centroid, oracle_classify, oracle_distance, oracle_matrix, pair_corpus,
};

type Check = Result<String, String>;

fn require(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn oracle_parity() -> Check {
    let start = Instant::now();
    let corpus = pair_corpus(7, 600);
    let (mut classify, mut matrix) = (0, 0);
    let (mut area_err, mut centroid_err, mut dist_err) = (0f64, 0f64, 0f64);
    for (a, b) in &corpus {
        classify += usize::from(classify_relation(a, b).unwrap() != oracle_classify(a, b));
        matrix += usize::from(de9im(a, b).unwrap().to_string() != oracle_matrix(a, b));
        for g in [a, b] {
            area_err = area_err.max((area(g).unwrap() - oracle_area(g)).abs());
            let c = centroid(g).unwrap();
            let (x, y) = oracle_centroid(g);
            centroid_err = centroid_err.max((c.x - x).abs()).max((c.y - y).abs());
        }
        dist_err = dist_err.max((min_distance(a, b) - oracle_distance(a, b)).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    require(
        corpus.len() >= 500
            && classify == 0
            && matrix == 0
            && area_err <= 1e-12
            && centroid_err <= 1e-9
            && dist_err <= 1e-9
            && secs < 60.0,
        format!(
            "{} pairs, {classify} label and {matrix} matrix mismatches, max errors area {area_err:.1e} \
             centroid {centroid_err:.1e} distance {dist_err:.1e}, {secs:.2}s",
            corpus.len()
        ),
    )
}

fn de9im_algebra() -> Check {
    let corpus = pair_corpus(7, 600);
    let mut violations = [0usize; 4];
    for (a, b) in &corpus {
        let (ab, ba) = (de9im(a, b).unwrap(), de9im(b, a).unwrap());
        violations[0] += usize::from(ab.transpose() != ba);
        let pab = named_predicates(&ab, a.kind(), b.kind());
        let pba = named_predicates(&ba, b.kind(), a.kind());
        violations[1] += usize::from(
            pab.contains(&PredicateName::Within) != pba.contains(&PredicateName::Contains),
        );
        violations[2] += usize::from(
            pab.contains(&PredicateName::Intersects) == pab.contains(&PredicateName::Disjoint),
        );
        let disjoint = classify_relation(a, b).unwrap() == PredicateName::Disjoint;
        violations[3] += usize::from(disjoint != (min_distance(a, b) > 0.0));
    }
    require(
        violations == [0; 4],
        format!(
            "{} pairs, violations transpose/within-contains/intersects-disjoint/disjoint-distance {violations:?}",
            corpus.len()
        ),
    )
}

fn parser() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut round_trips = 0;
    for _ in 0..10_000 {
        let g = random_geometry(&mut rng);
        let text = format_wkt(&g);
        if parse_wkt(&text).is_ok_and(|back| same_bits(&g, &back) && format_wkt(&back) == text) {
            round_trips += 1;
        }
    }
    let (mut total, mut rejected) = (0, 0);
    for base in bases() {
        for bad in mutations(&base) {
            total += 1;
            rejected += usize::from(bad != base && parse_wkt(&bad).is_err());
        }
    }
    require(
        round_trips == 10_000 && total >= 100 && rejected == total,
        format!("{round_trips}/10000 bitwise round-trips, {rejected}/{total} mutations rejected"),
    )
}

fn join_records(seed: u64, prefix: &str) -> Vec<GeometryRecord> {
    let cfg = BuilderConfig {
        bbox: BBox::new(-89.45, 43.04, -89.39, 43.10),
        samples_per_type: 67,
        seed,
        ..Default::default()
    };
    let mut out = generate_synthetic(&cfg).unwrap();
    out.truncate(200);
    for r in &mut out {
        r.id = format!("{prefix}{}", r.id);
    }
    out
}

fn spatial_join() -> Check {
    let (a, b) = (join_records(1, "a"), join_records(2, "b"));
    let mut details = vec![format!("{}x{}", a.len(), b.len())];
    let mut ok = a.len() == 200 && b.len() == 200;
    for r in [0.0, 0.003] {
        let joined: BTreeSet<_> = join_pairs(&a, &b, r).into_iter().collect();
        let mut brute = BTreeSet::new();
        for s in &a {
            for o in &b {
                if min_distance(&s.geometry, &o.geometry) <= r {
                    brute.insert((s.id.clone(), o.id.clone()));
                }
            }
        }
        ok &= joined == brute && !brute.is_empty();
        details.push(format!(
            "r={r}: {} joined, {} brute force",
            joined.len(),
            brute.len()
        ));
    }
    require(ok, details.join(", "))
}

fn probe_math() -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for (name, make) in LOSSES {
        let worst = worst_over_trials(make);
        ok &= worst < 1e-4;
        details.push(format!("{name} {worst:.1e}"));
    }
    let rt = worst_round_trip();
    ok &= rt < 1e-9;
    details.push(format!("transform round-trip {rt:.1e}"));

    let hp = Hyperparams {
        hidden_dim: 16,
        max_epochs: 8,
        patience: 8,
        batch_size: 16,
        seed: 11,
        ..Default::default()
    };
    let (tr, va) = (regression_data(1, 200), regression_data(2, 40));
    let t = TargetTransform::log();
    let a = train(&tr, &va, &hp, &t).unwrap();
    let b = train(&tr, &va, &hp, &t).unwrap();
    let same = param_bits(&a.params) == param_bits(&b.params) && a.history == b.history;
    ok &= same;
    details.push(format!("bitwise reproducible training {same}"));
    require(
        ok,
        format!("50 trials per loss, worst {}", details.join(", ")),
    )
}

fn metric_fixtures() -> Check {
    let set = |items: &[&'static str]| items.iter().copied().collect::<HashSet<_>>();
    let preds = ["a", "b", "c", "a", "b", "c", "a", "b"];
    let targets = ["a", "b", "c", "c", "b", "a", "a", "a"];
    let mape = metric_mape(
        &[4.0; 10],
        &[1.0, 2.0, 4.0, 8.0, 0.0, 0.0, 16.0, 32.0, 1.0, 2.0],
    )
    .unwrap();
    let queries = vec![
        (vec!["x", "y", "z", "w", "v"], set(&["q"])),
        (vec!["a", "b", "c", "d", "e"], set(&["e"])),
        (
            vec!["a", "b", "c", "d", "e"],
            set(&["a", "b", "c", "d", "e", "f"]),
        ),
    ];
    let checks = [
        metric_accuracy(&preds, &targets).unwrap() == 62.5,
        metric_mape(&[110.0], &[100.0]).unwrap().percent == 10.0,
        mape.percent == 126.5625 && mape.excluded_zero_targets == 2,
        metric_rmse(&[1.5, -2.0, 3.0, 2.0, 14.0], &[0.5, -1.0, 2.0, 3.0, 10.0]).unwrap() == 2.0,
        metric_precision_at_k(&["a", "b", "c", "d", "e"], &set(&["a", "c"]), 5).unwrap() == 0.4,
        mean_precision_at_k(&queries, 5).unwrap() == (0.0 + 0.2 + 1.0) / 3.0,
    ];
    let passed = checks.iter().filter(|&&c| c).count();
    require(
        passed == checks.len(),
        format!("{passed}/{} exact fixtures", checks.len()),
    )
}

fn t1_at_scale() -> Check {
    let start = Instant::now();
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("config.json");
    std::fs::write(&config, r#"{"dataset":{"samples_per_type":400}}"#).unwrap();
    let dir = root.path().join("data");
    let records = pipeline::generate(&config, &dir).unwrap();
    pipeline::truth(&dir).unwrap();
    pipeline::encode(
        &dir,
        EncoderKind::Reference,
        None,
        &root.path().join("cache.json"),
    )
    .unwrap();
    let opts = RunOptions {
        task: TaskId::T1,
        variant: Variant::Default,
        seed: None,
        encoder: None,
    };
    let report = pipeline::run(&dir, &opts, &root.path().join("results")).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (val, test) = (report.validation.unwrap(), report.test.unwrap());
    require(
        records.len() == 1200 && val >= 99.0 && test >= 99.0 && secs < 300.0,
        format!(
            "{} geometries, accuracy validation {val:.2}% test {test:.2}%, {secs:.1}s end to end",
            records.len()
        ),
    )
}

fn t6_sanity() -> Check {
    let (got, expected) = duplicate_pool_precision(1);
    let random = random_pool_precision(2);
    require(
        got == expected && random < 0.05,
        format!(
            "duplicate pool P@5 {got} (expected {expected}), random pool of 1000 P@5 {random:.4}"
        ),
    )
}

fn pipeline_determinism() -> Check {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run_pipeline(a.path(), SMALL_CONFIG, 42);
    let second = run_pipeline(b.path(), SMALL_CONFIG, 42);
    let differing: Vec<&String> = first
        .iter()
        .filter(|(k, v)| second.get(*k) != Some(v))
        .map(|(k, _)| k)
        .collect();
    let results = first
        .keys()
        .filter(|k| Path::new(k).starts_with("results"))
        .count();
    require(
        differing.is_empty() && first.len() == second.len() && results >= 10,
        format!(
            "{} files compared ({results} results files), differing {differing:?}",
            first.len()
        ),
    )
}

fn run(name: &str, f: impl FnOnce() -> Check + UnwindSafe) -> bool {
    let outcome = catch_unwind(f).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let (tag, detail, ok) = match outcome {
        Ok(d) => ("PASS", d, true),
        Err(d) => ("FAIL", d, false),
    };
    println!("{tag} {name}: {detail}");
    ok
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let checks: [Criterion; 9] = [
        ("oracle parity", oracle_parity),
        ("DE-9IM algebra", de9im_algebra),
        ("WKT parser", parser),
        ("spatial join", spatial_join),
        ("probe math", probe_math),
        ("metric fixtures", metric_fixtures),
        ("T1 at 1,200 geometries", t1_at_scale),
        ("T6 sanity", t6_sanity),
        ("pipeline determinism", pipeline_determinism),
    ];
    let passed = checks.iter().filter(|(name, f)| run(name, f)).count();
    println!("acceptance: {passed}/{} criteria passed", checks.len());
    if passed != checks.len() {
        std::process::exit(1);
    }
}
