//! MLP probes over frozen embeddings: model, target transforms, losses,
//! training, gradient checking, metrics and checkpoints.

mod checkpoint;
mod gradcheck;
mod loss;
mod metrics;
mod mlp;
mod train;
mod transform;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::Checkpoint;
pub use gradcheck::{grad_check, relative_error, GRAD_FLOOR, GRAD_STEP};
pub use loss::{loss_classification, loss_regression_combined, LossValue};
pub use metrics::{
    mean_precision_at_k, metric_accuracy, metric_mape, metric_precision_at_k, metric_rmse, Mape,
};
pub use mlp::{dropout_mask, mlp_forward, ForwardCache, Gradients, MlpParams};
pub use train::{probe_loss, train, EpochRecord, ProbeData, ProbeTargets, TrainOutcome};
pub use transform::{TargetTransform, LOG_EPS};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("dimension mismatch: expected {0}, found {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        loss: f64,
    },
    #[error("probe configuration: {0}")]
    Config(String),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparams {
    pub hidden_dim: usize,
    pub dropout: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without validation improvement before stopping.
    pub patience: usize,
    pub seed: u64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            hidden_dim: 256,
            dropout: 0.1,
            learning_rate: 1e-3,
            batch_size: 64,
            max_epochs: 100,
            patience: 10,
            seed: 42,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<(), ProbeError> {
        let ok = self.hidden_dim > 0
            && (0.0..1.0).contains(&self.dropout)
            && self.learning_rate > 0.0
            && self.batch_size > 0
            && self.max_epochs > 0
            && self.patience > 0
            && self.patience <= self.max_epochs;
        if ok {
            Ok(())
        } else {
            Err(ProbeError::Config(format!(
                "invalid hyperparameters {self:?}"
            )))
        }
    }
}
