//! Task runners T1-T6, nearest-neighbour retrieval and result reports.

mod report;
mod retrieval;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dataset::{DatasetError, Example, LocationQuery, Split, Target, TaskDataset, TaskId};
use crate::encoding::{EmbeddingVector, EncodingError};
use crate::geometry::GeometryKind;
use crate::probe::{
    metric_accuracy, metric_mape, metric_precision_at_k, metric_rmse, train, Hyperparams,
    MlpParams, ProbeData, ProbeError, ProbeTargets, TargetTransform,
};

pub use report::{build_report, canonical_rows, Report};
pub use retrieval::{Similarity, VectorIndex};

/// Embeddings by item id (geometry ids and relation-phrase ids).
pub type Embeddings = HashMap<String, EmbeddingVector>;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("no embedding for '{0}'")]
    MissingEmbedding(String),
    #[error("variant '{variant}' is not defined for {task}")]
    InvalidVariant { task: TaskId, variant: Variant },
    #[error("retrieval pool is empty")]
    EmptyPool,
    #[error("zero vector for '{0}'")]
    ZeroVector(String),
    #[error("{0}")]
    Data(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Default,
    PolygonOnly,
    WithoutGeometryType,
    WithGeometryType,
    DisjointOnly,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Default,
        Variant::PolygonOnly,
        Variant::WithoutGeometryType,
        Variant::WithGeometryType,
        Variant::DisjointOnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Default => "default",
            Variant::PolygonOnly => "polygon_only",
            Variant::WithoutGeometryType => "without_geometry_type",
            Variant::WithGeometryType => "with_geometry_type",
            Variant::DisjointOnly => "disjoint_only",
        }
    }

    /// Human-readable row label.
    pub fn label(self) -> &'static str {
        match self {
            Variant::Default => "",
            Variant::PolygonOnly => "Polygon only",
            Variant::WithoutGeometryType => "Without geometry type",
            Variant::WithGeometryType => "With geometry type",
            Variant::DisjointOnly => "Disjoint only",
        }
    }

    /// Resolves `default` to the task's baseline variant and rejects
    /// variants the task does not have.
    pub fn resolve(self, task: TaskId) -> Result<Variant, EvalError> {
        let ok = match (task, self) {
            (TaskId::T4, Variant::Default) => return Ok(Variant::WithoutGeometryType),
            (_, Variant::Default) => true,
            (TaskId::T2, Variant::PolygonOnly) => true,
            (TaskId::T4, Variant::WithoutGeometryType | Variant::WithGeometryType) => true,
            (TaskId::T5, Variant::DisjointOnly) => true,
            _ => false,
        };
        if ok {
            Ok(self)
        } else {
            Err(EvalError::InvalidVariant {
                task,
                variant: self,
            })
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown variant '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricName {
    AccuracyPct,
    MapePct,
    Rmse,
    PrecisionAtK,
}

impl MetricName {
    pub fn for_task(task: TaskId) -> Self {
        match task {
            TaskId::T1 | TaskId::T4 => MetricName::AccuracyPct,
            TaskId::T2 => MetricName::MapePct,
            TaskId::T3 | TaskId::T5 => MetricName::Rmse,
            TaskId::T6 => MetricName::PrecisionAtK,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            MetricName::AccuracyPct => "Accuracy(%)",
            MetricName::MapePct => "MAPE(%)",
            MetricName::Rmse => "RMSE",
            MetricName::PrecisionAtK => "Precision@k",
        }
    }
}

/// Validation and test value of one task run, always on the original target
/// scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: TaskId,
    pub variant: Variant,
    pub encoder: String,
    pub metric: MetricName,
    pub validation: Option<f64>,
    pub test: Option<f64>,
    pub metadata: BTreeMap<String, Value>,
}

impl MetricsReport {
    /// `<task>_<variant>__<encoder>.json`
    pub fn file_name(&self) -> String {
        format!("{}_{}__{}.json", self.task, self.variant, self.encoder)
    }
}

fn embedding<'a>(emb: &'a Embeddings, id: &str) -> Result<&'a EmbeddingVector, EvalError> {
    emb.get(id)
        .ok_or_else(|| EvalError::MissingEmbedding(id.to_string()))
}

/// Concatenated input embeddings, optionally followed by one-hot geometry
/// types of every input.
fn features(
    examples: &[&Example],
    emb: &Embeddings,
    with_types: bool,
) -> Result<Array2<f64>, EvalError> {
    let first = examples
        .first()
        .ok_or_else(|| EvalError::Data("no examples".into()))?;
    let d = embedding(emb, &first.inputs[0])?.dim();
    let width = first.inputs.len() * d
        + if with_types {
            3 * first.inputs.len()
        } else {
            0
        };
    let mut x = Array2::zeros((examples.len(), width));
    for (mut row, e) in x.rows_mut().into_iter().zip(examples) {
        let mut col = 0;
        for id in &e.inputs {
            let v = embedding(emb, id)?;
            if v.dim() != d {
                return Err(EncodingError::DimensionMismatch(d, v.dim()).into());
            }
            for &val in v.values() {
                row[col] = f64::from(val);
                col += 1;
            }
        }
        if with_types {
            for k in &e.input_kinds {
                row[col + k.index()] = 1.0;
                col += 3;
            }
        }
        if col != width {
            return Err(EvalError::Data(format!(
                "example '{}' has a different input shape",
                e.id
            )));
        }
    }
    Ok(x)
}

fn by_split<'a>(examples: &[&'a Example], s: Split) -> Vec<&'a Example> {
    examples.iter().copied().filter(|e| e.split == s).collect()
}

fn sizes_metadata(meta: &mut BTreeMap<String, Value>, examples: &[&Example], hp: &Hyperparams) {
    for s in Split::ALL {
        meta.insert(
            format!("{s}_size"),
            json!(examples.iter().filter(|e| e.split == s).count()),
        );
    }
    meta.insert("seed".into(), json!(hp.seed));
}

fn check_task(ds: &TaskDataset, task: TaskId) -> Result<(), EvalError> {
    if ds.task != task {
        return Err(EvalError::Data(format!(
            "expected a {task} dataset, got {}",
            ds.task
        )));
    }
    ds.check_isolation()?;
    Ok(())
}

/// Trains a classifier and reports accuracy on validation and test.
fn run_classification(
    task: TaskId,
    variant: Variant,
    examples: Vec<&Example>,
    emb: &Embeddings,
    hp: &Hyperparams,
    encoder: &str,
    with_types: bool,
) -> Result<MetricsReport, EvalError> {
    let classes: Vec<String> = examples
        .iter()
        .map(|e| e.target.label().unwrap_or_default().to_string())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let class_of = |e: &Example| {
        let l = e.target.label().unwrap_or_default();
        classes
            .iter()
            .position(|c| c == l)
            .expect("class collected above")
    };
    let data = |s: Split| -> Result<(ProbeData, Vec<usize>), EvalError> {
        let part = by_split(&examples, s);
        let labels: Vec<usize> = part.iter().map(|e| class_of(e)).collect();
        let x = if part.is_empty() {
            Array2::zeros((0, 0))
        } else {
            features(&part, emb, with_types)?
        };
        let y = ProbeTargets::Classes {
            labels: labels.clone(),
            n_classes: classes.len(),
        };
        Ok((ProbeData::new(x, y)?, labels))
    };
    let (tr, _) = data(Split::Train)?;
    let (va, va_labels) = data(Split::Validation)?;
    let (te, te_labels) = data(Split::Test)?;
    let outcome = train(&tr, &va, hp, &TargetTransform::Identity)?;
    let acc = |d: &ProbeData, labels: &[usize]| -> Result<f64, EvalError> {
        let preds = argmax_rows(&outcome.params, d)?;
        Ok(metric_accuracy(&preds, labels)?)
    };
    let mut metadata = BTreeMap::new();
    sizes_metadata(&mut metadata, &examples, hp);
    metadata.insert("classes".into(), json!(classes));
    metadata.insert("input_dim".into(), json!(tr.x.ncols()));
    metadata.insert("best_epoch".into(), json!(outcome.best_epoch));
    metadata.insert("epochs_run".into(), json!(outcome.history.len()));
    Ok(MetricsReport {
        task,
        variant,
        encoder: encoder.to_string(),
        metric: MetricName::AccuracyPct,
        validation: Some(acc(&va, &va_labels)?),
        test: Some(acc(&te, &te_labels)?),
        metadata,
    })
}

fn argmax_rows(p: &MlpParams, d: &ProbeData) -> Result<Vec<usize>, EvalError> {
    let out = p.predict(d.x.view())?;
    Ok(out
        .rows()
        .into_iter()
        .map(|r| {
            let mut best = 0;
            for (i, &v) in r.iter().enumerate() {
                if v > r[best] {
                    best = i;
                }
            }
            best
        })
        .collect())
}

enum RegressionMetric {
    Mape,
    Rmse,
}

enum TransformChoice {
    Log,
    MinMax,
}

#[allow(clippy::too_many_arguments)]
fn run_regression(
    task: TaskId,
    variant: Variant,
    examples: Vec<&Example>,
    emb: &Embeddings,
    hp: &Hyperparams,
    encoder: &str,
    transform: TransformChoice,
    metric: RegressionMetric,
) -> Result<MetricsReport, EvalError> {
    let targets = |part: &[&Example]| -> Array2<f64> {
        let width = part.first().map_or(1, |e| e.target.values().len());
        let mut y = Array2::zeros((part.len(), width));
        for (mut row, e) in y.rows_mut().into_iter().zip(part) {
            for (c, v) in e.target.values().into_iter().enumerate() {
                row[c] = v;
            }
        }
        y
    };
    let data = |s: Split| -> Result<(ProbeData, Array2<f64>), EvalError> {
        let part = by_split(&examples, s);
        let y = targets(&part);
        let x = if part.is_empty() {
            Array2::zeros((0, 0))
        } else {
            features(&part, emb, false)?
        };
        Ok((ProbeData::new(x, ProbeTargets::Values(y.clone()))?, y))
    };
    let (tr, tr_y) = data(Split::Train)?;
    let (va, va_y) = data(Split::Validation)?;
    let (te, te_y) = data(Split::Test)?;
    let transform = match transform {
        TransformChoice::Log => TargetTransform::log(),
        TransformChoice::MinMax => TargetTransform::fit_minmax(tr_y.view())?,
    };
    let outcome = train(&tr, &va, hp, &transform)?;

    let mut metadata = BTreeMap::new();
    sizes_metadata(&mut metadata, &examples, hp);
    metadata.insert("input_dim".into(), json!(tr.x.ncols()));
    metadata.insert("best_epoch".into(), json!(outcome.best_epoch));
    metadata.insert("epochs_run".into(), json!(outcome.history.len()));
    metadata.insert(
        "transform".into(),
        serde_json::to_value(&transform).unwrap_or(Value::Null),
    );
    let mut clamped = outcome.clamped;
    let mut score = |d: &ProbeData, y: &Array2<f64>, split: Split| -> Result<f64, EvalError> {
        let (pred, c) = transform.inverse(outcome.params.predict(d.x.view())?.view());
        clamped |= c;
        let p: Vec<f64> = pred.iter().copied().collect();
        let t: Vec<f64> = y.iter().copied().collect();
        Ok(match metric {
            RegressionMetric::Mape => {
                let m = metric_mape(&p, &t)?;
                metadata.insert(
                    format!("{split}_excluded_zero_targets"),
                    json!(m.excluded_zero_targets),
                );
                m.percent
            }
            RegressionMetric::Rmse => metric_rmse(&p, &t)?,
        })
    };
    let validation = score(&va, &va_y, Split::Validation)?;
    let test = score(&te, &te_y, Split::Test)?;
    metadata.insert("inverse_clamped".into(), json!(clamped));
    Ok(MetricsReport {
        task,
        variant,
        encoder: encoder.to_string(),
        metric: match metric {
            RegressionMetric::Mape => MetricName::MapePct,
            RegressionMetric::Rmse => MetricName::Rmse,
        },
        validation: Some(validation),
        test: Some(test),
        metadata,
    })
}

/// T1: geometry type from Enc(g), 3-class accuracy.
pub fn run_t1(
    ds: &TaskDataset,
    emb: &Embeddings,
    hp: &Hyperparams,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    check_task(ds, TaskId::T1)?;
    let examples: Vec<&Example> = ds.examples.iter().collect();
    run_classification(
        TaskId::T1,
        Variant::Default,
        examples,
        emb,
        hp,
        encoder,
        false,
    )
}

/// T2: area from Enc(g), log transform, MAPE.
pub fn run_t2(
    ds: &TaskDataset,
    emb: &Embeddings,
    hp: &Hyperparams,
    variant: Variant,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    check_task(ds, TaskId::T2)?;
    let variant = variant.resolve(TaskId::T2)?;
    let examples: Vec<&Example> = ds
        .examples
        .iter()
        .filter(|e| variant != Variant::PolygonOnly || e.input_kinds[0] == GeometryKind::Polygon)
        .collect();
    run_regression(
        TaskId::T2,
        variant,
        examples,
        emb,
        hp,
        encoder,
        TransformChoice::Log,
        RegressionMetric::Mape,
    )
}

/// T3: centroid from Enc(g), min-max transform, RMSE in degrees.
pub fn run_t3(
    ds: &TaskDataset,
    emb: &Embeddings,
    hp: &Hyperparams,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    check_task(ds, TaskId::T3)?;
    let examples: Vec<&Example> = ds.examples.iter().collect();
    run_regression(
        TaskId::T3,
        Variant::Default,
        examples,
        emb,
        hp,
        encoder,
        TransformChoice::MinMax,
        RegressionMetric::Rmse,
    )
}

/// T4: predicate from [Enc(gi); Enc(gj)], optionally with one-hot types.
pub fn run_t4(
    ds: &TaskDataset,
    emb: &Embeddings,
    hp: &Hyperparams,
    variant: Variant,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    check_task(ds, TaskId::T4)?;
    let variant = variant.resolve(TaskId::T4)?;
    let examples: Vec<&Example> = ds.examples.iter().collect();
    run_classification(
        TaskId::T4,
        variant,
        examples,
        emb,
        hp,
        encoder,
        variant == Variant::WithGeometryType,
    )
}

/// T5: distance from [Enc(gi); Enc(gj)], log transform, RMSE in degrees.
/// `disjoint_only` keeps the pairs at positive distance, which are exactly
/// the disjoint ones.
pub fn run_t5(
    ds: &TaskDataset,
    emb: &Embeddings,
    hp: &Hyperparams,
    variant: Variant,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    check_task(ds, TaskId::T5)?;
    let variant = variant.resolve(TaskId::T5)?;
    let examples: Vec<&Example> = ds
        .examples
        .iter()
        .filter(|e| {
            variant != Variant::DisjointOnly || matches!(e.target, Target::Value(d) if d > 0.0)
        })
        .collect();
    run_regression(
        TaskId::T5,
        variant,
        examples,
        emb,
        hp,
        encoder,
        TransformChoice::Log,
        RegressionMetric::Rmse,
    )
}

/// T6: for each query, top-k of Enc(rel, g_j) over the pool of all distinct
/// answer subjects; mean P@k on the test column.
pub fn run_t6(
    queries: &[LocationQuery],
    emb: &Embeddings,
    k: usize,
    similarity: Similarity,
    encoder: &str,
) -> Result<MetricsReport, EvalError> {
    if queries.is_empty() {
        return Err(EvalError::EmptyPool);
    }
    let pool_ids: BTreeSet<&str> = queries
        .iter()
        .flat_map(|q| q.answers.iter().map(String::as_str))
        .collect();
    let first = pool_ids.iter().next().ok_or(EvalError::EmptyPool)?;
    let mut index = VectorIndex::with_similarity(embedding(emb, first)?.dim(), similarity);
    for id in &pool_ids {
        index.insert(id, &embedding(emb, id)?.to_f64())?;
    }
    if k == 0 || k > index.len() {
        return Err(ProbeError::Config(format!("k = {k} must be in 1..={}", index.len())).into());
    }
    let mut per_predicate: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    let mut total = 0.0;
    for q in queries {
        let query = embedding(emb, &q.phrase_id())?.to_f64();
        let retrieved: Vec<String> = index
            .top_k(&query, k)?
            .into_iter()
            .map(|(id, _)| id)
            .collect();
        let relevant: HashSet<String> = q.answers.iter().cloned().collect();
        let p = metric_precision_at_k(&retrieved, &relevant, k)?;
        total += p;
        let e = per_predicate
            .entry(q.predicate.to_string())
            .or_insert((0.0, 0));
        e.0 += p;
        e.1 += 1;
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("k".into(), json!(k));
    metadata.insert("queries".into(), json!(queries.len()));
    metadata.insert("pool_size".into(), json!(index.len()));
    metadata.insert("pool".into(), json!("all distinct answer subjects"));
    metadata.insert("similarity".into(), json!(similarity));
    metadata.insert(
        "per_predicate_precision".into(),
        json!(per_predicate
            .iter()
            .map(|(p, (s, n))| (p.clone(), s / *n as f64))
            .collect::<BTreeMap<_, _>>()),
    );
    Ok(MetricsReport {
        task: TaskId::T6,
        variant: Variant::Default,
        encoder: encoder.to_string(),
        metric: MetricName::PrecisionAtK,
        validation: None,
        test: Some(total / queries.len() as f64),
        metadata,
    })
}
