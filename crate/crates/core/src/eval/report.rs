use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EvalError, MetricName, MetricsReport, Variant};
use crate::dataset::TaskId;

/// Rows of the results table in display order, with their setting label.
pub fn canonical_rows() -> [(TaskId, Variant, &'static str); 8] {
    [
        (TaskId::T1, Variant::Default, ""),
        (TaskId::T2, Variant::Default, "All geometries"),
        (TaskId::T2, Variant::PolygonOnly, "Polygon only"),
        (TaskId::T3, Variant::Default, ""),
        (
            TaskId::T4,
            Variant::WithoutGeometryType,
            "Without geometry type",
        ),
        (TaskId::T4, Variant::WithGeometryType, "With geometry type"),
        (TaskId::T5, Variant::DisjointOnly, "Disjoint only"),
        (TaskId::T6, Variant::Default, ""),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub task: TaskId,
    pub variant: Variant,
    pub setting: String,
    pub encoder: String,
    pub metric: MetricName,
    pub validation: Option<f64>,
    pub test: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub runs: Vec<MetricsReport>,
}

fn format_value(metric: MetricName, v: Option<f64>) -> String {
    match v {
        None => "N/A".into(),
        Some(v) => match metric {
            MetricName::AccuracyPct | MetricName::MapePct => format!("{v:.2}"),
            MetricName::Rmse => format!("{v:.6}"),
            MetricName::PrecisionAtK => format!("{v:.4}"),
        },
    }
}

impl Report {
    /// Canonical rows for every encoder seen (missing runs become N/A), then
    /// any other runs in sorted order.
    pub fn from_runs(mut runs: Vec<MetricsReport>) -> Self {
        runs.sort_by(|a, b| (a.task, a.variant, &a.encoder).cmp(&(b.task, b.variant, &b.encoder)));
        let mut encoders: BTreeSet<&str> = runs.iter().map(|r| r.encoder.as_str()).collect();
        if encoders.is_empty() {
            encoders.insert("reference");
        }
        let find = |t: TaskId, v: Variant, e: &str| {
            runs.iter()
                .find(|r| r.task == t && r.variant == v && r.encoder == e)
        };
        let mut rows = Vec::new();
        let canonical = canonical_rows();
        for e in &encoders {
            for (task, variant, setting) in canonical {
                let run = find(task, variant, e);
                rows.push(ReportRow {
                    task,
                    variant,
                    setting: setting.to_string(),
                    encoder: e.to_string(),
                    metric: MetricName::for_task(task),
                    validation: run.and_then(|r| r.validation),
                    test: run.and_then(|r| r.test),
                });
            }
        }
        for r in &runs {
            if !canonical
                .iter()
                .any(|(t, v, _)| *t == r.task && *v == r.variant)
            {
                rows.push(ReportRow {
                    task: r.task,
                    variant: r.variant,
                    setting: r.variant.as_str().to_string(),
                    encoder: r.encoder.clone(),
                    metric: r.metric,
                    validation: r.validation,
                    test: r.test,
                });
            }
        }
        Self { rows, runs }
    }

    /// One line per task/variant, validation and test columns per encoder.
    pub fn to_markdown(&self) -> String {
        let encoders: BTreeSet<&str> = self.rows.iter().map(|r| r.encoder.as_str()).collect();
        let mut keys: Vec<(TaskId, Variant, &str, MetricName)> = Vec::new();
        for r in &self.rows {
            if !keys.iter().any(|k| k.0 == r.task && k.1 == r.variant) {
                keys.push((r.task, r.variant, &r.setting, r.metric));
            }
        }
        let mut s = String::from("| Task | Setting | Metric |");
        let mut rule = String::from("|---|---|---|");
        for e in &encoders {
            s.push_str(&format!(" {e} validation | {e} test |"));
            rule.push_str("---|---|");
        }
        s.push('\n');
        s.push_str(&rule);
        s.push('\n');
        for (task, variant, setting, metric) in keys {
            s.push_str(&format!(
                "| {} | {} | {} |",
                task.title(),
                setting,
                metric.label()
            ));
            for e in &encoders {
                let row = self
                    .rows
                    .iter()
                    .find(|r| r.task == task && r.variant == variant && r.encoder == *e);
                s.push_str(&format!(
                    " {} | {} |",
                    format_value(metric, row.and_then(|r| r.validation)),
                    format_value(metric, row.and_then(|r| r.test)),
                ));
            }
            s.push('\n');
        }
        s
    }
}

/// Reads every run file in `dir` and writes `results.json` and `table.md`
/// next to them.
pub fn build_report(dir: &Path) -> Result<Report, EvalError> {
    let io = |e: std::io::Error| EvalError::Data(format!("{}: {e}", dir.display()));
    let mut paths: Vec<_> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && p.file_name()
                    .and_then(|n| n.to_str())
                    .is_some_and(|n| n.contains("__"))
        })
        .collect();
    paths.sort();
    let mut runs = Vec::with_capacity(paths.len());
    for p in &paths {
        let text = fs::read_to_string(p).map_err(io)?;
        let run: MetricsReport = serde_json::from_str(&text)
            .map_err(|e| EvalError::Data(format!("{}: {e}", p.display())))?;
        runs.push(run);
    }
    let report = Report::from_runs(runs);
    let json = serde_json::to_string_pretty(&report).map_err(|e| EvalError::Data(e.to_string()))?;
    fs::write(dir.join("results.json"), json + "\n").map_err(io)?;
    fs::write(dir.join("table.md"), report.to_markdown()).map_err(io)?;
    Ok(report)
}
