use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::RwLock;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;

use super::{EmbeddingVector, EncodingError};

/// Embeddings keyed by (encoder id, item id). Reads are concurrent, writes
/// take the lock exclusively.
#[derive(Debug, Default)]
pub struct EmbeddingCache {
    entries: RwLock<HashMap<(String, String), EmbeddingVector>>,
}

fn encode_f32(v: &EmbeddingVector) -> String {
    let bytes: Vec<u8> = v.values().iter().flat_map(|x| x.to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode_f32(s: &str) -> Option<EmbeddingVector> {
    let bytes = STANDARD.decode(s).ok()?;
    if bytes.len() % 4 != 0 {
        return None;
    }
    let values: Vec<f32> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    values
        .iter()
        .all(|x| x.is_finite())
        .then(|| EmbeddingVector::new(values))
}

impl EmbeddingCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, encoder: &str, id: &str) -> Option<EmbeddingVector> {
        let map = self.entries.read().expect("cache lock");
        map.get(&(encoder.to_string(), id.to_string())).cloned()
    }

    pub fn insert(&self, encoder: &str, id: &str, v: EmbeddingVector) {
        let mut map = self.entries.write().expect("cache lock");
        map.insert((encoder.to_string(), id.to_string()), v);
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads `<id>\t<base64 little-endian f32>` lines under `encoder`.
    pub fn load(&self, path: &Path, encoder: &str) -> Result<usize, EncodingError> {
        let err = |msg: String| EncodingError::Cache(format!("{}: {msg}", path.display()));
        let text = fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        let mut map = self.entries.write().expect("cache lock");
        let mut n = 0;
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (id, blob) = line
                .split_once('\t')
                .ok_or_else(|| err(format!("line {}: missing tab", i + 1)))?;
            let v = decode_f32(blob)
                .ok_or_else(|| err(format!("line {}: bad embedding blob", i + 1)))?;
            map.insert((encoder.to_string(), id.to_string()), v);
            n += 1;
        }
        Ok(n)
    }

    /// Writes every entry of `encoder`, sorted by id.
    pub fn save(&self, path: &Path, encoder: &str) -> Result<usize, EncodingError> {
        let map = self.entries.read().expect("cache lock");
        let mut rows: Vec<(&str, &EmbeddingVector)> = map
            .iter()
            .filter(|((e, _), _)| e == encoder)
            .map(|((_, id), v)| (id.as_str(), v))
            .collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        for (id, v) in &rows {
            let _ = writeln!(out, "{id}\t{}", encode_f32(v));
        }
        fs::write(path, out)
            .map_err(|e| EncodingError::Cache(format!("{}: {e}", path.display())))?;
        Ok(rows.len())
    }
}
