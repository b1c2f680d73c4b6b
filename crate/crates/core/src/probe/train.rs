use ndarray::{Array, Array2, Axis, Dimension};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loss::{loss_classification, loss_regression_combined, LossValue};
use super::mlp::{dropout_mask, round_f32, Gradients, MlpParams};
use super::{Hyperparams, ProbeError, TargetTransform};

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeTargets {
    /// Class indices in `0..n_classes`.
    Classes {
        labels: Vec<usize>,
        n_classes: usize,
    },
    /// Regression targets on the original scale, one row per example.
    Values(Array2<f64>),
}

/// Feature matrix with aligned targets.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeData {
    pub x: Array2<f64>,
    pub y: ProbeTargets,
}

impl ProbeData {
    pub fn new(x: Array2<f64>, y: ProbeTargets) -> Result<Self, ProbeError> {
        let n = match &y {
            ProbeTargets::Classes { labels, .. } => labels.len(),
            ProbeTargets::Values(v) => v.nrows(),
        };
        if n != x.nrows() {
            return Err(ProbeError::DimensionMismatch(x.nrows(), n));
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn output_dim(&self) -> usize {
        match &self.y {
            ProbeTargets::Classes { n_classes, .. } => *n_classes,
            ProbeTargets::Values(v) => v.ncols(),
        }
    }

    fn rows(&self, idx: &[usize]) -> (Array2<f64>, ProbeTargets) {
        let x = self.x.select(Axis(0), idx);
        let y = match &self.y {
            ProbeTargets::Classes { labels, n_classes } => ProbeTargets::Classes {
                labels: idx.iter().map(|&i| labels[i]).collect(),
                n_classes: *n_classes,
            },
            ProbeTargets::Values(v) => ProbeTargets::Values(v.select(Axis(0), idx)),
        };
        (x, y)
    }
}

/// Loss of network outputs against targets, dispatching on the task kind.
pub fn probe_loss(
    out: &Array2<f64>,
    y: &ProbeTargets,
    transform: &TargetTransform,
) -> Result<LossValue, ProbeError> {
    match y {
        ProbeTargets::Classes { labels, .. } => loss_classification(out.view(), labels),
        ProbeTargets::Values(v) => loss_regression_combined(out.view(), v.view(), transform),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    /// Parameters of the epoch with the lowest validation loss.
    pub params: MlpParams,
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub best_val_loss: f64,
    /// Some log-transform inverse was clamped during training.
    pub clamped: bool,
}

struct Adam {
    lr: f64,
    t: i32,
    m: Gradients,
    v: Gradients,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

fn zeros_like(p: &MlpParams) -> Gradients {
    Gradients {
        w1: Array2::zeros(p.w1.dim()),
        b1: Array::zeros(p.b1.dim()),
        w2: Array2::zeros(p.w2.dim()),
        b2: Array::zeros(p.b2.dim()),
    }
}

fn adam_update<D: Dimension>(
    p: &mut Array<f64, D>,
    g: &Array<f64, D>,
    m: &mut Array<f64, D>,
    v: &mut Array<f64, D>,
    lr_t: f64,
) {
    ndarray::Zip::from(&mut *p)
        .and(g)
        .and(m)
        .and(v)
        .for_each(|p, &g, m, v| {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr_t * *m / (v.sqrt() + ADAM_EPS);
        });
    round_f32(p);
}

impl Adam {
    fn new(p: &MlpParams, lr: f64) -> Self {
        Self {
            lr,
            t: 0,
            m: zeros_like(p),
            v: zeros_like(p),
        }
    }

    /// One bias-corrected Adam step; parameters stay f32-representable.
    fn step(&mut self, p: &mut MlpParams, g: &Gradients) {
        self.t += 1;
        let lr_t = self.lr * (1.0 - BETA2.powi(self.t)).sqrt() / (1.0 - BETA1.powi(self.t));
        adam_update(&mut p.w1, &g.w1, &mut self.m.w1, &mut self.v.w1, lr_t);
        adam_update(&mut p.b1, &g.b1, &mut self.m.b1, &mut self.v.b1, lr_t);
        adam_update(&mut p.w2, &g.w2, &mut self.m.w2, &mut self.v.w2, lr_t);
        adam_update(&mut p.b2, &g.b2, &mut self.m.b2, &mut self.v.b2, lr_t);
    }
}

/// Mini-batch Adam with early stopping on validation loss. Deterministic for
/// a given seed: one generator drives initialization, shuffling and dropout.
pub fn train(
    train: &ProbeData,
    val: &ProbeData,
    hp: &Hyperparams,
    transform: &TargetTransform,
) -> Result<TrainOutcome, ProbeError> {
    hp.validate()?;
    if train.is_empty() || val.is_empty() {
        return Err(ProbeError::EmptyInput(
            "training needs train and validation examples".into(),
        ));
    }
    if train.x.ncols() != val.x.ncols() || train.output_dim() != val.output_dim() {
        return Err(ProbeError::DimensionMismatch(
            train.x.ncols(),
            val.x.ncols(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(hp.seed);
    let mut params = MlpParams::init(
        train.x.ncols(),
        hp.hidden_dim,
        train.output_dim(),
        hp.dropout,
        &mut rng,
    );
    let mut adam = Adam::new(&params, hp.learning_rate);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut history = Vec::new();
    let mut best = (params.clone(), 0usize, f64::INFINITY);
    let mut clamped = false;

    for epoch in 1..=hp.max_epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (b, batch) in order.chunks(hp.batch_size).enumerate() {
            let (xb, yb) = train.rows(batch);
            let mask = (hp.dropout > 0.0)
                .then(|| dropout_mask(xb.nrows(), xb.ncols(), hp.dropout, &mut rng));
            let cache = params.forward_batch(xb.view(), mask.as_ref())?;
            let l = probe_loss(&cache.out, &yb, transform)?;
            if !l.loss.is_finite() {
                return Err(ProbeError::NonFiniteLoss {
                    epoch,
                    batch: b,
                    loss: l.loss,
                });
            }
            clamped |= l.clamped;
            total += l.loss * batch.len() as f64;
            let g = params.backward(&cache, l.grad.view());
            adam.step(&mut params, &g);
        }
        let val_loss = probe_loss(&params.predict(val.x.view())?, &val.y, transform)?.loss;
        if !val_loss.is_finite() {
            return Err(ProbeError::NonFiniteLoss {
                epoch,
                batch: usize::MAX,
                loss: val_loss,
            });
        }
        history.push(EpochRecord {
            epoch,
            train_loss: total / train.len() as f64,
            val_loss,
        });
        if val_loss < best.2 {
            best = (params.clone(), epoch, val_loss);
        } else if epoch - best.1 >= hp.patience {
            log::debug!("early stop at epoch {epoch}, best {}", best.1);
            break;
        }
    }
    let (params, best_epoch, best_val_loss) = best;
    Ok(TrainOutcome {
        params,
        history,
        best_epoch,
        best_val_loss,
        clamped,
    })
}
