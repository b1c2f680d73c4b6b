use std::collections::HashSet;
use std::hash::Hash;

use super::ProbeError;

fn check_lengths(a: usize, b: usize) -> Result<(), ProbeError> {
    if a != b {
        return Err(ProbeError::DimensionMismatch(a, b));
    }
    if a == 0 {
        return Err(ProbeError::EmptyInput("no predictions".into()));
    }
    Ok(())
}

/// Percentage of exact matches.
pub fn metric_accuracy<T: PartialEq>(preds: &[T], targets: &[T]) -> Result<f64, ProbeError> {
    check_lengths(preds.len(), targets.len())?;
    let correct = preds.iter().zip(targets).filter(|(p, t)| p == t).count();
    Ok(100.0 * correct as f64 / preds.len() as f64)
}

/// MAPE with the number of zero-target rows left out of it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mape {
    pub percent: f64,
    pub excluded_zero_targets: usize,
}

/// Mean absolute percentage error over the rows with a non-zero target.
pub fn metric_mape(preds: &[f64], targets: &[f64]) -> Result<Mape, ProbeError> {
    check_lengths(preds.len(), targets.len())?;
    let mut sum = 0.0;
    let mut used = 0usize;
    for (p, t) in preds.iter().zip(targets) {
        if *t != 0.0 {
            sum += ((p - t) / t).abs();
            used += 1;
        }
    }
    if used == 0 {
        return Err(ProbeError::EmptyInput("every MAPE target is zero".into()));
    }
    Ok(Mape {
        percent: 100.0 * sum / used as f64,
        excluded_zero_targets: preds.len() - used,
    })
}

/// Root mean squared error over flattened components.
pub fn metric_rmse(preds: &[f64], targets: &[f64]) -> Result<f64, ProbeError> {
    check_lengths(preds.len(), targets.len())?;
    let sse: f64 = preds
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok((sse / preds.len() as f64).sqrt())
}

/// Fraction of the first `k` retrieved items that are relevant.
pub fn metric_precision_at_k<T: Eq + Hash>(
    retrieved: &[T],
    relevant: &HashSet<T>,
    k: usize,
) -> Result<f64, ProbeError> {
    if k == 0 || k > retrieved.len() {
        return Err(ProbeError::Config(format!(
            "k = {k} must be in 1..={}",
            retrieved.len()
        )));
    }
    let hits = retrieved[..k]
        .iter()
        .filter(|r| relevant.contains(*r))
        .count();
    Ok(hits as f64 / k as f64)
}

/// Mean of per-query P@k.
pub fn mean_precision_at_k<T: Eq + Hash>(
    queries: &[(Vec<T>, HashSet<T>)],
    k: usize,
) -> Result<f64, ProbeError> {
    if queries.is_empty() {
        return Err(ProbeError::EmptyInput("no queries".into()));
    }
    let mut sum = 0.0;
    for (retrieved, relevant) in queries {
        sum += metric_precision_at_k(retrieved, relevant, k)?;
    }
    Ok(sum / queries.len() as f64)
}
