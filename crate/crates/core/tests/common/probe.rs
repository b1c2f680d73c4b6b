//! Gradient-check and transform fixtures for the probe.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoprobe::probe::{grad_check, MlpParams, ProbeData, ProbeTargets, TargetTransform};

pub const TRIALS: usize = 50;

pub fn random_matrix(
    rng: &mut ChaCha8Rng,
    rows: usize,
    cols: usize,
    lo: f64,
    hi: f64,
) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.random_range(lo..hi))
}

/// Targets, transform and output width for one trial.
pub type TargetMaker = fn(&mut ChaCha8Rng, usize) -> (ProbeTargets, TargetTransform, usize);

pub fn cross_entropy(rng: &mut ChaCha8Rng, rows: usize) -> (ProbeTargets, TargetTransform, usize) {
    let n = rng.random_range(2..6);
    let labels = (0..rows).map(|_| rng.random_range(0..n)).collect();
    (
        ProbeTargets::Classes {
            labels,
            n_classes: n,
        },
        TargetTransform::Identity,
        n,
    )
}

pub fn identity(rng: &mut ChaCha8Rng, rows: usize) -> (ProbeTargets, TargetTransform, usize) {
    let y = random_matrix(rng, rows, 2, -2.0, 2.0);
    (ProbeTargets::Values(y), TargetTransform::Identity, 2)
}

pub fn log(rng: &mut ChaCha8Rng, rows: usize) -> (ProbeTargets, TargetTransform, usize) {
    let y = random_matrix(rng, rows, 1, 1e-3, 3.0);
    (ProbeTargets::Values(y), TargetTransform::log(), 1)
}

pub fn minmax(rng: &mut ChaCha8Rng, rows: usize) -> (ProbeTargets, TargetTransform, usize) {
    let y = random_matrix(rng, rows, 2, -89.55, 43.15);
    let t = TargetTransform::MinMax {
        min: vec![-89.55, 43.0],
        max: vec![-89.25, 43.15],
    };
    (ProbeTargets::Values(y), t, 2)
}

pub const LOSSES: [(&str, TargetMaker); 4] = [
    ("cross-entropy", cross_entropy),
    ("combined/identity", identity),
    ("combined/log", log),
    ("combined/minmax", minmax),
];

/// Worst gradient error over `TRIALS` random networks, inputs and targets.
pub fn worst_over_trials(make_targets: TargetMaker) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    for _ in 0..TRIALS {
        let rows = rng.random_range(2..7);
        let input = rng.random_range(2..6);
        let hidden = rng.random_range(2..6);
        let (y, transform, out) = make_targets(&mut rng, rows);
        let p = MlpParams::init(input, hidden, out, 0.1, &mut rng);
        let x = random_matrix(&mut rng, rows, input, -1.0, 1.0);
        worst = worst.max(grad_check(&p, x.view(), &y, &transform).unwrap());
    }
    worst
}

/// Largest inverse(forward(y)) error over log, min-max and identity
/// transforms on area- and coordinate-like data.
pub fn worst_round_trip() -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let areas = random_matrix(&mut rng, 500, 1, 0.0, 1e-4);
    let coords = Array2::from_shape_fn((500, 2), |(_, c)| {
        if c == 0 {
            rng.random_range(-89.55..-89.25)
        } else {
            rng.random_range(43.0..43.15)
        }
    });
    let mut worst: f64 = 0.0;
    for (y, t) in [
        (&areas, TargetTransform::log()),
        (&coords, TargetTransform::fit_minmax(coords.view()).unwrap()),
        (&coords, TargetTransform::Identity),
    ] {
        let (back, clamped) = t.inverse(t.forward(y.view()).unwrap().view());
        assert!(!clamped);
        worst = (&back - y).iter().fold(worst, |m, v| m.max(v.abs()));
    }
    worst
}

pub fn param_bits(p: &MlpParams) -> Vec<u64> {
    p.w1.iter()
        .chain(&p.b1)
        .chain(&p.w2)
        .chain(&p.b2)
        .map(|v| v.to_bits())
        .collect()
}

/// Inputs in [-1, 1) with a positive, area-sized target.
pub fn regression_data(seed: u64, n: usize) -> ProbeData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = random_matrix(&mut rng, n, 6, -1.0, 1.0);
    let y = Array2::from_shape_fn((n, 1), |(i, _)| (x[[i, 0]] * 2.0 + x[[i, 3]]).exp() * 1e-5);
    ProbeData::new(x, ProbeTargets::Values(y)).unwrap()
}
