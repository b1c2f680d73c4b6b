//! Drives the command-line tool through every stage.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

/// A config small enough for a debug-profile run of all six tasks.
pub const SMALL_CONFIG: &str = r#"{
  "dataset": {"samples_per_type": 150, "triplets_per_category": 40, "location_objects_per_category": 20},
  "encoder": {"dim": 64},
  "probe": {"hidden_dim": 32, "max_epochs": 20, "patience": 5}
}"#;

/// (task, variant) for every report row.
pub const RUNS: [(&str, &str); 8] = [
    ("t1", "default"),
    ("t2", "default"),
    ("t2", "polygon_only"),
    ("t3", "default"),
    ("t4", "without_geometry_type"),
    ("t4", "with_geometry_type"),
    ("t5", "disjoint_only"),
    ("t6", "default"),
];

fn cli(root: &Path, args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_geoprobe"))
        .current_dir(root)
        .args(args)
        .output()
        .expect("spawn geoprobe");
    assert!(
        out.status.success(),
        "geoprobe {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

/// Runs generate, truth, encode, all runs and report inside `root` using
/// relative paths, and returns every file it produced keyed by path.
pub fn run_pipeline(root: &Path, config: &str, seed: u64) -> BTreeMap<String, Vec<u8>> {
    std::fs::write(root.join("config.json"), config).unwrap();
    cli(
        root,
        &["generate", "--config", "config.json", "--out", "data"],
    );
    cli(root, &["truth", "--in", "data"]);
    cli(
        root,
        &[
            "encode",
            "--encoder",
            "reference",
            "--in",
            "data",
            "--cache",
            "cache.json",
        ],
    );
    let seed = seed.to_string();
    for (task, variant) in RUNS {
        cli(
            root,
            &[
                "run",
                "--task",
                task,
                "--variant",
                variant,
                "--seed",
                &seed,
                "--in",
                "data",
                "--out",
                "results",
            ],
        );
    }
    cli(root, &["report", "--in", "results"]);
    let mut files = BTreeMap::new();
    collect(root, root, &mut files);
    files
}

fn collect(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect(root, &path, out);
        } else {
            let key = path
                .strip_prefix(root)
                .unwrap()
                .to_string_lossy()
                .into_owned();
            out.insert(key, std::fs::read(&path).unwrap());
        }
    }
}
