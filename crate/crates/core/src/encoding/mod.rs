//! Text embeddings of WKT strings and relation phrases: tokenization,
//! sliding-window segmentation, mean pooling, a deterministic reference
//! encoder and a client for an external provider.

mod cache;
mod provider;
mod reference;
mod tokenize;

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{PredicateName, RelationLabel};
use crate::geometry::{format_wkt, Geometry, GeometryRecord};

pub use cache::EmbeddingCache;
pub use provider::ProviderClient;
pub use reference::{position_vector, reference_token_vectors, token_base_vector, POSITION_WEIGHT};
pub use tokenize::{tokenize_reference, window_segments};

#[derive(Debug, Error)]
pub enum EncodingError {
    #[error("cannot embed empty text")]
    EmptyInput,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("embedding provider: {0}")]
    Provider(String),
    #[error("embedding cache: {0}")]
    Cache(String),
    #[error("encoder configuration: {0}")]
    Config(String),
}

/// A pooled embedding. Stored as f32, the precision of the cache file.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingVector(Vec<f32>);

impl EmbeddingVector {
    pub fn new(values: Vec<f32>) -> Self {
        Self(values)
    }

    pub fn from_f64(values: &[f64]) -> Self {
        Self(values.iter().map(|&x| x as f32).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f32] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| f64::from(x)).collect()
    }
}

/// `a` followed by `b`.
pub fn concat(a: &EmbeddingVector, b: &EmbeddingVector) -> Result<EmbeddingVector, EncodingError> {
    if a.dim() != b.dim() {
        return Err(EncodingError::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut v = Vec::with_capacity(2 * a.dim());
    v.extend_from_slice(a.values());
    v.extend_from_slice(b.values());
    Ok(EmbeddingVector(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Reference,
    Provider,
}

impl FromStr for EncoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "reference" => Ok(EncoderKind::Reference),
            "provider" => Ok(EncoderKind::Provider),
            _ => Err(format!(
                "unknown encoder '{s}' (expected reference or provider)"
            )),
        }
    }
}

/// Everything needed to build an encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderHandle {
    pub kind: EncoderKind,
    /// Embedding width; for providers it is checked against the replies when
    /// non-zero.
    pub dim: usize,
    pub tokenizer: String,
    pub window: usize,
    pub overlap: usize,
    pub seed: u64,
    pub endpoint: Option<String>,
    pub model: String,
    pub batch_size: usize,
    pub timeout_secs: u64,
}

impl EncoderHandle {
    pub fn reference(dim: usize, seed: u64) -> Self {
        Self {
            kind: EncoderKind::Reference,
            dim,
            tokenizer: "reference".into(),
            window: 512,
            overlap: 256,
            seed,
            endpoint: None,
            model: "reference".into(),
            batch_size: 64,
            timeout_secs: 0,
        }
    }

    pub fn provider(endpoint: &str, model: &str) -> Self {
        Self {
            kind: EncoderKind::Provider,
            dim: 0,
            tokenizer: model.into(),
            window: 512,
            overlap: 256,
            seed: 0,
            endpoint: Some(endpoint.into()),
            model: model.into(),
            batch_size: 32,
            timeout_secs: 120,
        }
    }

    pub fn validate(&self) -> Result<(), EncodingError> {
        let fail = |m: &str| Err(EncodingError::Config(m.into()));
        if !(self.overlap < self.window) || self.window == 0 {
            return fail("window overlap must satisfy 0 <= overlap < window");
        }
        match self.kind {
            EncoderKind::Reference if self.dim == 0 => fail("reference dimension must be positive"),
            EncoderKind::Provider if self.endpoint.as_deref().unwrap_or("").is_empty() => {
                fail("provider encoder needs an endpoint")
            }
            _ => Ok(()),
        }
    }

    /// Short name used in result file names and report columns.
    pub fn name(&self) -> &str {
        match self.kind {
            EncoderKind::Reference => "reference",
            EncoderKind::Provider => &self.model,
        }
    }

    /// Cache key: two handles with the same id produce the same vectors.
    pub fn id(&self) -> String {
        match self.kind {
            EncoderKind::Reference => format!(
                "reference-d{}-s{}-w{}-o{}",
                self.dim, self.seed, self.window, self.overlap
            ),
            EncoderKind::Provider => {
                format!("provider-{}-w{}-o{}", self.model, self.window, self.overlap)
            }
        }
    }
}

/// An encoder built from a handle. Immutable and safe to share.
#[derive(Debug, Clone)]
pub struct Encoder {
    handle: EncoderHandle,
    provider: Option<ProviderClient>,
}

impl Encoder {
    pub fn new(handle: EncoderHandle) -> Result<Self, EncodingError> {
        handle.validate()?;
        let provider = match handle.kind {
            EncoderKind::Reference => None,
            EncoderKind::Provider => Some(ProviderClient::new(
                handle.endpoint.as_deref().unwrap_or_default(),
                &handle.model,
                handle.window,
                handle.overlap,
                handle.batch_size,
                Duration::from_secs(handle.timeout_secs.max(1)),
            )?),
        };
        Ok(Self { handle, provider })
    }

    pub fn reference(dim: usize, seed: u64) -> Self {
        Self::new(EncoderHandle::reference(dim, seed)).expect("valid reference handle")
    }

    pub fn handle(&self) -> &EncoderHandle {
        &self.handle
    }

    pub fn embed_text(&self, text: &str) -> Result<EmbeddingVector, EncodingError> {
        Ok(self.embed_texts(&[text])?.remove(0))
    }

    /// Embeds a batch; the reference path fans out over threads, the
    /// provider path sends batched requests. Output order matches input.
    pub fn embed_texts(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EncodingError> {
        if texts.iter().any(|t| t.trim().is_empty()) {
            return Err(EncodingError::EmptyInput);
        }
        let out = match &self.provider {
            Some(client) => client.embed(texts)?,
            None => self.reference_batch(texts)?,
        };
        if self.handle.dim != 0 {
            if let Some(v) = out.iter().find(|v| v.dim() != self.handle.dim) {
                return Err(EncodingError::DimensionMismatch(self.handle.dim, v.dim()));
            }
        }
        Ok(out)
    }

    fn reference_batch(&self, texts: &[&str]) -> Result<Vec<EmbeddingVector>, EncodingError> {
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
        let chunk = texts.len().div_ceil(threads).max(16);
        std::thread::scope(|s| {
            let workers: Vec<_> = texts
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        let mut positions = Vec::new();
                        part.iter()
                            .map(|t| self.reference_one(t, &mut positions))
                            .collect::<Result<Vec<_>, _>>()
                    })
                })
                .collect();
            let mut out = Vec::with_capacity(texts.len());
            for w in workers {
                out.extend(w.join().expect("encoder thread panicked")?);
            }
            Ok(out)
        })
    }

    fn reference_one(
        &self,
        text: &str,
        positions: &mut Vec<Vec<f64>>,
    ) -> Result<EmbeddingVector, EncodingError> {
        let h = &self.handle;
        let tokens = tokenize_reference(text);
        if tokens.is_empty() {
            return Err(EncodingError::EmptyInput);
        }
        let mut acc = vec![0.0; h.dim];
        let mut count = 0usize;
        for seg in window_segments(&tokens, h.window, h.overlap) {
            reference::accumulate_segment(h.seed, h.dim, seg, positions, &mut acc);
            count += seg.len();
        }
        for a in &mut acc {
            *a /= count as f64;
        }
        Ok(EmbeddingVector::from_f64(&acc))
    }
}

pub fn embed_text(enc: &Encoder, text: &str) -> Result<EmbeddingVector, EncodingError> {
    enc.embed_text(text)
}

pub fn encode_geometry(enc: &Encoder, g: &Geometry) -> Result<EmbeddingVector, EncodingError> {
    enc.embed_text(&format_wkt(g))
}

/// `"<predicate> <wkt>"`, the text behind a T6 query embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationPhrase {
    pub predicate: RelationLabel,
    pub wkt: String,
}

impl RelationPhrase {
    pub fn new(predicate: RelationLabel, g: &Geometry) -> Self {
        Self {
            predicate,
            wkt: format_wkt(g),
        }
    }

    pub fn render(&self) -> String {
        format!("{} {}", self.predicate.phrase(), self.wkt)
    }
}

impl fmt::Display for RelationPhrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for RelationPhrase {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let near = RelationLabel::DisjointButNear.phrase();
        if let Some(rest) = s.strip_prefix(near).and_then(|r| r.strip_prefix(' ')) {
            return Ok(Self {
                predicate: RelationLabel::DisjointButNear,
                wkt: rest.to_string(),
            });
        }
        let (word, rest) = s
            .split_once(' ')
            .ok_or_else(|| format!("'{s}' is not '<predicate> <wkt>'"))?;
        Ok(Self {
            predicate: RelationLabel::Named(word.parse::<PredicateName>()?),
            wkt: rest.to_string(),
        })
    }
}

pub fn encode_relation_phrase(
    enc: &Encoder,
    p: &RelationPhrase,
) -> Result<EmbeddingVector, EncodingError> {
    enc.embed_text(&p.render())
}

/// An encoder in front of a shared cache keyed by (encoder id, item id).
#[derive(Debug)]
pub struct CachedEncoder {
    encoder: Encoder,
    id: String,
    cache: EmbeddingCache,
}

impl CachedEncoder {
    pub fn new(encoder: Encoder) -> Self {
        let id = encoder.handle().id();
        Self {
            encoder,
            id,
            cache: EmbeddingCache::new(),
        }
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn cache(&self) -> &EmbeddingCache {
        &self.cache
    }

    pub fn encoder_id(&self) -> &str {
        &self.id
    }

    /// Embeddings for `(item id, text)` pairs; only cache misses reach the
    /// encoder.
    pub fn encode_items(
        &self,
        items: &[(String, String)],
    ) -> Result<Vec<EmbeddingVector>, EncodingError> {
        let mut out: Vec<Option<EmbeddingVector>> = items
            .iter()
            .map(|(id, _)| self.cache.get(&self.id, id))
            .collect();
        let missing: Vec<usize> = (0..items.len()).filter(|&i| out[i].is_none()).collect();
        if !missing.is_empty() {
            let texts: Vec<&str> = missing.iter().map(|&i| items[i].1.as_str()).collect();
            let fresh = self.encoder.embed_texts(&texts)?;
            for (&i, v) in missing.iter().zip(fresh) {
                self.cache.insert(&self.id, &items[i].0, v.clone());
                out[i] = Some(v);
            }
        }
        Ok(out.into_iter().map(|v| v.expect("filled")).collect())
    }

    pub fn encode_records(
        &self,
        records: &[GeometryRecord],
    ) -> Result<Vec<EmbeddingVector>, EncodingError> {
        let items: Vec<(String, String)> = records
            .iter()
            .map(|r| (r.id.clone(), format_wkt(&r.geometry)))
            .collect();
        self.encode_items(&items)
    }

    pub fn get(&self, id: &str) -> Option<EmbeddingVector> {
        self.cache.get(&self.id, id)
    }
}
