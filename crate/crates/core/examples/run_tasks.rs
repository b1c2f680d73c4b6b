//! Runs every stage of the pipeline in a temporary directory and prints the
//! results table; the same flow as the command-line tool.
//!
//! cargo run --release --example run_tasks -- [samples_per_type]

use geoprobe::dataset::TaskId;
use geoprobe::encoding::EncoderKind;
use geoprobe::eval::Variant;
use geoprobe::pipeline::{self, RunOptions};

fn main() {
    let samples: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("samples_per_type must be an integer"))
        .unwrap_or(200);
    let root = std::env::temp_dir().join(format!("geoprobe-run-tasks-{}", std::process::id()));
    std::fs::create_dir_all(&root).expect("temp dir");
    let config = root.join("config.json");
    let text = format!(
        r#"{{"dataset": {{"samples_per_type": {samples}, "triplets_per_category": 60, "location_objects_per_category": 30}}}}"#
    );
    std::fs::write(&config, text).expect("write config");

    let data = root.join("data");
    let results = root.join("results");
    pipeline::generate(&config, &data).expect("generate");
    let summary = pipeline::truth(&data).expect("truth");
    for (task, [train, val, test]) in &summary.split_counts {
        println!("{task}: {train} train, {val} validation, {test} test");
    }
    println!(
        "{} category shortfalls (see manifest.json)",
        summary.shortfalls.len()
    );
    pipeline::encode(
        &data,
        EncoderKind::Reference,
        None,
        &root.join("cache.json"),
    )
    .expect("encode");
    let runs = [
        (TaskId::T1, Variant::Default),
        (TaskId::T2, Variant::Default),
        (TaskId::T2, Variant::PolygonOnly),
        (TaskId::T3, Variant::Default),
        (TaskId::T4, Variant::WithoutGeometryType),
        (TaskId::T4, Variant::WithGeometryType),
        (TaskId::T5, Variant::DisjointOnly),
        (TaskId::T6, Variant::Default),
    ];
    for (task, variant) in runs {
        let opts = RunOptions {
            task,
            variant,
            seed: None,
            encoder: None,
        };
        pipeline::run(&data, &opts, &results).expect("run");
    }
    let report = pipeline::report(&results).expect("report");
    println!("{}", report.to_markdown());
    println!("files in {}", root.display());
}
