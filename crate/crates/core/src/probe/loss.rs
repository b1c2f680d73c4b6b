use ndarray::{Array2, ArrayView2, Axis};

use super::{ProbeError, TargetTransform};

/// A loss value with its gradient w.r.t. the network outputs.
#[derive(Debug, Clone)]
pub struct LossValue {
    pub loss: f64,
    pub grad: Array2<f64>,
    /// Some prediction had to be clamped to invert the target transform.
    pub clamped: bool,
}

/// Softmax cross-entropy averaged over the batch.
pub fn loss_classification(
    logits: ArrayView2<f64>,
    classes: &[usize],
) -> Result<LossValue, ProbeError> {
    let (n, k) = logits.dim();
    if n != classes.len() {
        return Err(ProbeError::DimensionMismatch(n, classes.len()));
    }
    if n == 0 {
        return Err(ProbeError::EmptyInput("empty batch".into()));
    }
    if let Some(&c) = classes.iter().find(|&&c| c >= k) {
        return Err(ProbeError::Config(format!(
            "class {c} out of range for {k} outputs"
        )));
    }
    let mut grad = logits.to_owned();
    let mut loss = 0.0;
    for (mut row, &c) in grad.axis_iter_mut(Axis(0)).zip(classes) {
        let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - m).exp());
        let z: f64 = row.sum();
        // -log softmax_c = log z - (logit_c - m)
        loss += z.ln() - row[c].ln();
        row.mapv_inplace(|v| v / z);
        row[c] -= 1.0;
    }
    grad /= n as f64;
    Ok(LossValue {
        loss: loss / n as f64,
        grad,
        clamped: false,
    })
}

/// MSE in transformed space plus MSE on the original scale, equally
/// weighted and averaged over every output component.
pub fn loss_regression_combined(
    pred_t: ArrayView2<f64>,
    target: ArrayView2<f64>,
    transform: &TargetTransform,
) -> Result<LossValue, ProbeError> {
    if pred_t.dim() != target.dim() {
        return Err(ProbeError::DimensionMismatch(pred_t.len(), target.len()));
    }
    let count = pred_t.len();
    if count == 0 {
        return Err(ProbeError::EmptyInput("empty batch".into()));
    }
    let target_t = transform.forward(target)?;
    let mut grad = Array2::zeros(pred_t.dim());
    let mut loss = 0.0;
    let mut clamped = false;
    let scale = 2.0 / count as f64;
    for ((r, c), &p) in pred_t.indexed_iter() {
        let dt = p - target_t[[r, c]];
        let (inv, dinv, flag) = transform.inverse_value(p, c);
        clamped |= flag;
        let d0 = inv - target[[r, c]];
        loss += dt * dt + d0 * d0;
        grad[[r, c]] = scale * (dt + d0 * dinv);
    }
    Ok(LossValue {
        loss: loss / count as f64,
        grad,
        clamped,
    })
}
