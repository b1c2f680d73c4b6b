use ndarray::ArrayView2;

use super::mlp::{Gradients, MlpParams};
use super::train::{probe_loss, ProbeTargets};
use super::{ProbeError, TargetTransform};

/// Finite-difference step.
pub const GRAD_STEP: f64 = 1e-5;
/// Denominator floor of the relative error, so gradients that are zero up
/// to rounding compare as equal.
pub const GRAD_FLOOR: f64 = 1e-6;

fn loss_at(
    p: &MlpParams,
    x: ArrayView2<f64>,
    y: &ProbeTargets,
    transform: &TargetTransform,
) -> Result<f64, ProbeError> {
    Ok(probe_loss(&p.predict(x)?, y, transform)?.loss)
}

fn slices_mut(p: &mut MlpParams) -> [&mut [f64]; 4] {
    [
        p.w1.as_slice_mut().expect("standard layout"),
        p.b1.as_slice_mut().expect("standard layout"),
        p.w2.as_slice_mut().expect("standard layout"),
        p.b2.as_slice_mut().expect("standard layout"),
    ]
}

fn grad_slices(g: &Gradients) -> [Vec<f64>; 4] {
    [
        g.w1.iter().copied().collect(),
        g.b1.to_vec(),
        g.w2.iter().copied().collect(),
        g.b2.to_vec(),
    ]
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(GRAD_FLOOR)
}

/// Largest relative error between backprop gradients and central
/// differences over every parameter. Dropout is not applied.
pub fn grad_check(
    p: &MlpParams,
    x: ArrayView2<f64>,
    y: &ProbeTargets,
    transform: &TargetTransform,
) -> Result<f64, ProbeError> {
    let cache = p.forward_batch(x, None)?;
    let l = probe_loss(&cache.out, y, transform)?;
    let analytic = grad_slices(&p.backward(&cache, l.grad.view()));
    let mut probe = p.clone();
    let mut worst: f64 = 0.0;
    for (block, grads) in analytic.iter().enumerate() {
        for (i, &a) in grads.iter().enumerate() {
            let orig = slices_mut(&mut probe)[block][i];
            slices_mut(&mut probe)[block][i] = orig + GRAD_STEP;
            let up = loss_at(&probe, x, y, transform)?;
            slices_mut(&mut probe)[block][i] = orig - GRAD_STEP;
            let down = loss_at(&probe, x, y, transform)?;
            slices_mut(&mut probe)[block][i] = orig;
            let numeric = (up - down) / (2.0 * GRAD_STEP);
            worst = worst.max(relative_error(a, numeric));
        }
    }
    Ok(worst)
}
