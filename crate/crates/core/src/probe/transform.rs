use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::ProbeError;

/// Offset inside the logarithm so zero targets stay finite.
pub const LOG_EPS: f64 = 1e-12;

/// Largest argument of `exp` that stays finite.
const EXP_MAX: f64 = 709.782_712_893_384;

/// Target scaling used during training. Predictions are mapped back with
/// `inverse` before any metric is computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TargetTransform {
    Identity,
    Log { eps: f64 },
    MinMax { min: Vec<f64>, max: Vec<f64> },
}

impl TargetTransform {
    pub fn log() -> Self {
        TargetTransform::Log { eps: LOG_EPS }
    }

    /// Per-column min/max of the training targets. Constant columns are
    /// rejected.
    pub fn fit_minmax(y: ArrayView2<f64>) -> Result<Self, ProbeError> {
        if y.nrows() == 0 {
            return Err(ProbeError::EmptyInput("no training targets".into()));
        }
        let mut min = Vec::with_capacity(y.ncols());
        let mut max = Vec::with_capacity(y.ncols());
        for col in y.columns() {
            let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if !(hi > lo) {
                return Err(ProbeError::Config(format!(
                    "min-max transform needs max > min, column is constant at {lo}"
                )));
            }
            min.push(lo);
            max.push(hi);
        }
        Ok(TargetTransform::MinMax { min, max })
    }

    pub fn forward_value(&self, y: f64, col: usize) -> f64 {
        match self {
            TargetTransform::Identity => y,
            TargetTransform::Log { eps } => (y + eps).ln(),
            TargetTransform::MinMax { min, max } => (y - min[col]) / (max[col] - min[col]),
        }
    }

    /// Inverse and its derivative at `p`, plus whether `p` had to be clamped
    /// to keep the inverse finite.
    pub fn inverse_value(&self, p: f64, col: usize) -> (f64, f64, bool) {
        match self {
            TargetTransform::Identity => (p, 1.0, false),
            TargetTransform::Log { eps } => {
                let clamped = p > EXP_MAX;
                let e = p.min(EXP_MAX).exp();
                (e - eps, if clamped { 0.0 } else { e }, clamped)
            }
            TargetTransform::MinMax { min, max } => {
                let span = max[col] - min[col];
                (p * span + min[col], span, false)
            }
        }
    }

    pub fn forward(&self, y: ArrayView2<f64>) -> Result<Array2<f64>, ProbeError> {
        if let TargetTransform::MinMax { min, .. } = self {
            if min.len() != y.ncols() {
                return Err(ProbeError::DimensionMismatch(min.len(), y.ncols()));
            }
        }
        let mut out = y.to_owned();
        for ((_, c), v) in out.indexed_iter_mut() {
            *v = self.forward_value(*v, c);
        }
        if let TargetTransform::Log { eps } = self {
            if let Some(bad) = y.iter().find(|&&v| !(v + eps > 0.0)) {
                return Err(ProbeError::Config(format!(
                    "log transform needs targets > -{eps}, found {bad}"
                )));
            }
        }
        Ok(out)
    }

    /// Inverse on a matrix; the flag reports whether any entry was clamped.
    pub fn inverse(&self, p: ArrayView2<f64>) -> (Array2<f64>, bool) {
        let mut clamped = false;
        let mut out = p.to_owned();
        for ((_, c), v) in out.indexed_iter_mut() {
            let (y, _, flag) = self.inverse_value(*v, c);
            clamped |= flag;
            *v = y;
        }
        (out, clamped)
    }
}
