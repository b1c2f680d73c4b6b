use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::{Hyperparams, MlpParams, ProbeError, TargetTransform};

/// JSON model dump; weight blobs are base64 little-endian f32 in row-major
/// order. Parameters are kept f32-exact during training, so a reload gives
/// bitwise-identical outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub output_dim: usize,
    pub dropout: f64,
    pub w1: String,
    pub b1: String,
    pub w2: String,
    pub b2: String,
    pub transform: TargetTransform,
    pub hyperparams: Hyperparams,
    /// Class names by output index; empty for regression.
    pub classes: Vec<String>,
}

fn pack<'a>(values: impl Iterator<Item = &'a f64>) -> String {
    let bytes: Vec<u8> = values.flat_map(|&v| (v as f32).to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn unpack(blob: &str, len: usize, what: &str) -> Result<Vec<f64>, ProbeError> {
    let bytes = STANDARD
        .decode(blob)
        .map_err(|e| ProbeError::Checkpoint(format!("{what}: {e}")))?;
    if bytes.len() != 4 * len {
        return Err(ProbeError::Checkpoint(format!(
            "{what}: expected {len} floats, found {} bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes([c[0], c[1], c[2], c[3]])))
        .collect())
}

impl Checkpoint {
    pub fn new(
        params: &MlpParams,
        transform: &TargetTransform,
        hyperparams: &Hyperparams,
        classes: Vec<String>,
    ) -> Self {
        Self {
            input_dim: params.input_dim(),
            hidden_dim: params.hidden_dim(),
            output_dim: params.output_dim(),
            dropout: params.dropout,
            w1: pack(params.w1.iter()),
            b1: pack(params.b1.iter()),
            w2: pack(params.w2.iter()),
            b2: pack(params.b2.iter()),
            transform: transform.clone(),
            hyperparams: hyperparams.clone(),
            classes,
        }
    }

    pub fn params(&self) -> Result<MlpParams, ProbeError> {
        let (i, h, o) = (self.input_dim, self.hidden_dim, self.output_dim);
        let shape_err = |e: ndarray::ShapeError| ProbeError::Checkpoint(e.to_string());
        Ok(MlpParams {
            w1: Array2::from_shape_vec((h, i), unpack(&self.w1, h * i, "w1")?)
                .map_err(shape_err)?,
            b1: Array1::from(unpack(&self.b1, h, "b1")?),
            w2: Array2::from_shape_vec((o, h), unpack(&self.w2, o * h, "w2")?)
                .map_err(shape_err)?,
            b2: Array1::from(unpack(&self.b2, o, "b2")?),
            dropout: self.dropout,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), ProbeError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| ProbeError::Checkpoint(e.to_string()))?;
        fs::write(path, text)
            .map_err(|e| ProbeError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, ProbeError> {
        let text = fs::read_to_string(path)
            .map_err(|e| ProbeError::Checkpoint(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| ProbeError::Checkpoint(e.to_string()))
    }
}
