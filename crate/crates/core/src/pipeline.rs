//! File-based stages behind the command line: generate, truth, encode, run
//! and report. Every stage reads and writes plain files in a working
//! directory so that runs can be resumed and compared.
//!
//! Layout of a working directory:
//!
//! ```text
//! config.json            pipeline config echo
//! manifest.json          build manifest (seed, counts, shortfalls)
//! geometries.wkt         <id>\t<wkt>\t<source>
//! attributes.tsv         T1-T3 ground truth
//! triplets.tsv           T4/T5 relation triplets
//! location_queries.tsv   T6 queries
//! tasks/t1.tsv .. t5.tsv examples with split labels
//! encodings.json         encoder handles and cache paths
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::dataset::{
    build_attribute_table, build_geometry_tasks, build_location_queries_from, build_relation_tasks,
    build_relation_triplets_from, discover_relations, generate_synthetic, read_location_queries,
    read_task_dataset, write_attributes, write_location_queries, write_task_dataset,
    write_triplets, BuilderConfig, DatasetError, LocationQuery, TaskId,
};
use crate::encoding::{
    CachedEncoder, Encoder, EncoderHandle, EncoderKind, EncodingError, RelationPhrase,
};
use crate::eval::{
    build_report, run_t1, run_t2, run_t3, run_t4, run_t5, run_t6, Embeddings, EvalError,
    MetricsReport, Report, Similarity, Variant,
};
use crate::geometry::{read_wkt_lines, write_wkt_lines, GeometryRecord, IoError};
use crate::probe::{Hyperparams, ProbeError};

pub const CONFIG_FILE: &str = "config.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const GEOMETRIES_FILE: &str = "geometries.wkt";
pub const ATTRIBUTES_FILE: &str = "attributes.tsv";
pub const TRIPLETS_FILE: &str = "triplets.tsv";
pub const QUERIES_FILE: &str = "location_queries.tsv";
pub const ENCODINGS_FILE: &str = "encodings.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{path}: {source}")]
    File {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Geometry(#[from] IoError),
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl PipelineError {
    /// 1 usage, 2 data, 3 provider.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Encoding(EncodingError::Provider(_))
            | PipelineError::Eval(EvalError::Encoding(EncodingError::Provider(_))) => 3,
            PipelineError::Eval(EvalError::InvalidVariant { .. }) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, PipelineError>;

/// Encoder section of the pipeline config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EncoderSettings {
    /// Reference encoder width.
    pub dim: usize,
    /// Reference encoder seed.
    pub seed: u64,
    pub window: usize,
    pub overlap: usize,
    /// Provider model id.
    pub model: String,
    pub batch_size: usize,
    pub timeout_secs: u64,
}

impl Default for EncoderSettings {
    fn default() -> Self {
        Self {
            dim: 768,
            seed: 42,
            window: 512,
            overlap: 256,
            model: "gpt2".into(),
            batch_size: 32,
            timeout_secs: 120,
        }
    }
}

impl EncoderSettings {
    pub fn handle(&self, kind: EncoderKind, endpoint: Option<&str>) -> Result<EncoderHandle> {
        let mut h = match kind {
            EncoderKind::Reference => EncoderHandle::reference(self.dim, self.seed),
            EncoderKind::Provider => {
                let endpoint = endpoint.ok_or_else(|| {
                    PipelineError::Usage("provider encoder needs --endpoint".into())
                })?;
                let mut h = EncoderHandle::provider(endpoint, &self.model);
                h.timeout_secs = self.timeout_secs;
                h
            }
        };
        h.window = self.window;
        h.overlap = self.overlap;
        h.batch_size = self.batch_size;
        h.validate()?;
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RetrievalSettings {
    pub k: usize,
    pub similarity: Similarity,
}

impl Default for RetrievalSettings {
    fn default() -> Self {
        Self {
            k: 5,
            similarity: Similarity::Cosine,
        }
    }
}

/// Dataset, encoder, probe and retrieval settings in one JSON document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub dataset: BuilderConfig,
    pub encoder: EncoderSettings,
    pub probe: Hyperparams,
    pub retrieval: RetrievalSettings,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.dataset.validate()?;
        self.probe
            .validate()
            .map_err(|e| PipelineError::Data(e.to_string()))?;
        if self.retrieval.k == 0 {
            return Err(PipelineError::Data("retrieval k must be positive".into()));
        }
        Ok(())
    }
}

/// One encoded item set: which encoder produced it and where the vectors are.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingRecord {
    pub encoder_id: String,
    pub handle: EncoderHandle,
    pub cache: PathBuf,
    pub items: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| PipelineError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| PipelineError::File {
        path: path.display().to_string(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| PipelineError::Data(e.to_string()))?;
    write(path, &(text + "\n"))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| PipelineError::File {
        path: dir.display().to_string(),
        source,
    })
}

fn task_file(dir: &Path, task: TaskId) -> PathBuf {
    dir.join("tasks").join(format!("{task}.tsv"))
}

fn update_manifest(dir: &Path, section: &str, value: Value) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let mut manifest: BTreeMap<String, Value> = if path.exists() {
        read_json(&path)?
    } else {
        BTreeMap::new()
    };
    manifest.insert(section.to_string(), value);
    write_json(&path, &manifest)
}

/// Generates the synthetic geometry set described by the config file.
pub fn generate(config_path: &Path, out: &Path) -> Result<Vec<GeometryRecord>> {
    let cfg = PipelineConfig::load(config_path)?;
    let records = generate_synthetic(&cfg.dataset)?;
    create_dir(out)?;
    write_json(&out.join(CONFIG_FILE), &cfg)?;
    write_wkt_lines(&out.join(GEOMETRIES_FILE), &records)?;
    let mut per_kind: BTreeMap<String, usize> = BTreeMap::new();
    for r in &records {
        *per_kind.entry(r.kind().to_string()).or_default() += 1;
    }
    let path = out.join(MANIFEST_FILE);
    if path.exists() {
        fs::remove_file(&path).map_err(|source| PipelineError::File {
            path: path.display().to_string(),
            source,
        })?;
    }
    update_manifest(out, "seed", json!(cfg.dataset.seed))?;
    update_manifest(
        out,
        "config",
        serde_json::to_value(&cfg).unwrap_or(Value::Null),
    )?;
    update_manifest(
        out,
        "geometries",
        json!({ "total": records.len(), "per_type": per_kind }),
    )?;
    log::info!(
        "generated {} geometries into {}",
        records.len(),
        out.display()
    );
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthSummary {
    pub triplet_counts: BTreeMap<String, usize>,
    pub query_counts: BTreeMap<String, usize>,
    pub shortfalls: Vec<String>,
    pub candidate_counts: BTreeMap<String, usize>,
    pub degenerate_pairs: usize,
    pub split_counts: BTreeMap<String, [usize; 3]>,
}

/// Computes ground truth for T1-T6 and the task datasets with splits.
pub fn truth(dir: &Path) -> Result<TruthSummary> {
    let cfg = PipelineConfig::load(&dir.join(CONFIG_FILE))?;
    let records = read_wkt_lines(&dir.join(GEOMETRIES_FILE))?;
    let attributes = build_attribute_table(&records)?;
    let candidates = discover_relations(&records, &cfg.dataset);
    let triplets = build_relation_triplets_from(&records, &candidates, &cfg.dataset);
    let location = build_location_queries_from(&records, &candidates, &cfg.dataset);
    let [t1, t2, t3] = build_geometry_tasks(&attributes, &cfg.dataset.split, cfg.dataset.seed)?;
    let kinds: HashMap<String, _> = records.iter().map(|r| (r.id.clone(), r.kind())).collect();
    let [t4, t5] = build_relation_tasks(
        &triplets.triplets,
        &kinds,
        &cfg.dataset.split,
        cfg.dataset.seed,
    )?;

    write_attributes(&dir.join(ATTRIBUTES_FILE), &attributes)?;
    write_triplets(&dir.join(TRIPLETS_FILE), &triplets.triplets)?;
    write_location_queries(&dir.join(QUERIES_FILE), &location.queries)?;
    create_dir(&dir.join("tasks"))?;
    let mut split_counts = BTreeMap::new();
    for ds in [&t1, &t2, &t3, &t4, &t5] {
        write_task_dataset(&task_file(dir, ds.task), ds)?;
        split_counts.insert(ds.task.to_string(), ds.split_counts());
    }
    let mut shortfalls = triplets.shortfalls.clone();
    shortfalls.extend(location.shortfalls.iter().cloned());
    let summary = TruthSummary {
        triplet_counts: triplets.counts,
        query_counts: location.counts,
        shortfalls,
        candidate_counts: candidates
            .label_counts()
            .into_iter()
            .map(|(l, n)| (l.to_string(), n))
            .collect(),
        degenerate_pairs: candidates.degenerate_pairs,
        split_counts,
    };
    update_manifest(
        dir,
        "truth",
        serde_json::to_value(&summary).unwrap_or(Value::Null),
    )?;
    Ok(summary)
}

/// `(item id, text)` for every geometry and every T6 relation phrase.
pub fn encoding_items(
    records: &[GeometryRecord],
    queries: &[LocationQuery],
) -> Result<Vec<(String, String)>> {
    let by_id: HashMap<&str, &GeometryRecord> =
        records.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut items: Vec<(String, String)> = records
        .iter()
        .map(|r| (r.id.clone(), r.geometry.to_wkt()))
        .collect();
    let mut seen = BTreeSet::new();
    for q in queries {
        let id = q.phrase_id();
        if seen.insert(id.clone()) {
            let object = by_id.get(q.object_id.as_str()).ok_or_else(|| {
                PipelineError::Data(format!(
                    "query object '{}' is not a known geometry",
                    q.object_id
                ))
            })?;
            items.push((
                id,
                RelationPhrase::new(q.predicate, &object.geometry).render(),
            ));
        }
    }
    Ok(items)
}

/// Embeds every geometry and relation phrase, reusing vectors already in the
/// cache file, and records the encoder in `encodings.json`.
pub fn encode(
    dir: &Path,
    kind: EncoderKind,
    endpoint: Option<&str>,
    cache: &Path,
) -> Result<EncodingRecord> {
    let cfg = PipelineConfig::load(&dir.join(CONFIG_FILE))?;
    let handle = cfg.encoder.handle(kind, endpoint)?;
    let records = read_wkt_lines(&dir.join(GEOMETRIES_FILE))?;
    let queries = read_location_queries(&dir.join(QUERIES_FILE))?;
    let items = encoding_items(&records, &queries)?;
    let cached = CachedEncoder::new(Encoder::new(handle.clone())?);
    if cache.exists() {
        let n = cached.cache().load(cache, cached.encoder_id())?;
        log::info!("loaded {n} cached vectors from {}", cache.display());
    }
    cached.encode_items(&items)?;
    let n = cached.cache().save(cache, cached.encoder_id())?;
    let record = EncodingRecord {
        encoder_id: cached.encoder_id().to_string(),
        handle,
        cache: cache.to_path_buf(),
        items: n,
    };
    let path = dir.join(ENCODINGS_FILE);
    let mut all: BTreeMap<String, EncodingRecord> = if path.exists() {
        read_json(&path)?
    } else {
        BTreeMap::new()
    };
    all.insert(record.handle.name().to_string(), record.clone());
    write_json(&path, &all)?;
    Ok(record)
}

fn select_encoding(dir: &Path, encoder: Option<&str>) -> Result<EncodingRecord> {
    let path = dir.join(ENCODINGS_FILE);
    if !path.exists() {
        return Err(PipelineError::Data(format!(
            "{} not found; run encode first",
            path.display()
        )));
    }
    let mut all: BTreeMap<String, EncodingRecord> = read_json(&path)?;
    match encoder {
        Some(name) => all.remove(name).ok_or_else(|| {
            PipelineError::Usage(format!(
                "no encoding named '{name}' (available: {})",
                all.keys().cloned().collect::<Vec<_>>().join(", ")
            ))
        }),
        None if all.len() == 1 => Ok(all.into_values().next().expect("one entry")),
        None => Err(PipelineError::Usage(format!(
            "several encodings available ({}); choose one with --encoder",
            all.keys().cloned().collect::<Vec<_>>().join(", ")
        ))),
    }
}

fn load_embeddings<'a>(
    record: &EncodingRecord,
    ids: impl IntoIterator<Item = &'a str>,
) -> Result<Embeddings> {
    let cache = crate::encoding::EmbeddingCache::new();
    cache.load(&record.cache, &record.encoder_id)?;
    let mut out = Embeddings::new();
    for id in ids {
        if !out.contains_key(id) {
            let v = cache
                .get(&record.encoder_id, id)
                .ok_or_else(|| EvalError::MissingEmbedding(id.to_string()))?;
            out.insert(id.to_string(), v);
        }
    }
    Ok(out)
}

/// Options of one task run.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub task: TaskId,
    pub variant: Variant,
    pub seed: Option<u64>,
    /// Encoding name from `encodings.json`; optional when there is only one.
    pub encoder: Option<String>,
}

/// Runs one task and writes `<out>/<task>_<variant>__<encoder>.json`.
pub fn run(dir: &Path, opts: &RunOptions, out: &Path) -> Result<MetricsReport> {
    let cfg = PipelineConfig::load(&dir.join(CONFIG_FILE))?;
    let variant = opts.variant.resolve(opts.task)?;
    let mut hp = cfg.probe.clone();
    if let Some(seed) = opts.seed {
        hp.seed = seed;
    }
    let record = select_encoding(dir, opts.encoder.as_deref())?;
    let name = record.handle.name().to_string();
    let report = if opts.task == TaskId::T6 {
        let queries = read_location_queries(&dir.join(QUERIES_FILE))?;
        let phrase_ids: Vec<String> = queries.iter().map(LocationQuery::phrase_id).collect();
        let ids = queries
            .iter()
            .flat_map(|q| q.answers.iter().map(String::as_str))
            .chain(phrase_ids.iter().map(String::as_str));
        let emb = load_embeddings(&record, ids)?;
        run_t6(
            &queries,
            &emb,
            cfg.retrieval.k,
            cfg.retrieval.similarity,
            &name,
        )?
    } else {
        let ds = read_task_dataset(&task_file(dir, opts.task), opts.task)?;
        let emb = load_embeddings(
            &record,
            ds.examples
                .iter()
                .flat_map(|e| e.inputs.iter().map(String::as_str)),
        )?;
        match opts.task {
            TaskId::T1 => run_t1(&ds, &emb, &hp, &name)?,
            TaskId::T2 => run_t2(&ds, &emb, &hp, variant, &name)?,
            TaskId::T3 => run_t3(&ds, &emb, &hp, &name)?,
            TaskId::T4 => run_t4(&ds, &emb, &hp, variant, &name)?,
            TaskId::T5 => run_t5(&ds, &emb, &hp, variant, &name)?,
            TaskId::T6 => unreachable!("handled above"),
        }
    };
    create_dir(out)?;
    write_json(&out.join(report.file_name()), &report)?;
    Ok(report)
}

/// Collects the run files in `dir` into `results.json` and `table.md`.
pub fn report(dir: &Path) -> Result<Report> {
    Ok(build_report(dir)?)
}

impl From<ProbeError> for PipelineError {
    fn from(e: ProbeError) -> Self {
        PipelineError::Eval(EvalError::Probe(e))
    }
}
