//! Trains the MLP probe on a toy problem: classify which quadrant a noisy
//! 8-dimensional point falls in, then regress its squared norm.
//!
//! cargo run --example train_probe

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoprobe::probe::{
    metric_accuracy, metric_mape, train, Hyperparams, ProbeData, ProbeTargets, TargetTransform,
};

fn inputs(rng: &mut ChaCha8Rng, n: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, 8), |_| rng.random_range(-1.0..1.0))
}

fn quadrant(x: &Array2<f64>) -> Vec<usize> {
    x.rows()
        .into_iter()
        .map(|r| usize::from(r[0] > 0.0) * 2 + usize::from(r[1] > 0.0))
        .collect()
}

fn norm2(x: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_fn((x.nrows(), 1), |(i, _)| {
        x.row(i).iter().map(|v| v * v).sum()
    })
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (xtr, xva, xte) = (
        inputs(&mut rng, 800),
        inputs(&mut rng, 200),
        inputs(&mut rng, 200),
    );
    let hp = Hyperparams {
        hidden_dim: 64,
        max_epochs: 60,
        ..Default::default()
    };

    let classes = |x: &Array2<f64>| ProbeTargets::Classes {
        labels: quadrant(x),
        n_classes: 4,
    };
    let tr = ProbeData::new(xtr.clone(), classes(&xtr)).unwrap();
    let va = ProbeData::new(xva.clone(), classes(&xva)).unwrap();
    let out = train(&tr, &va, &hp, &TargetTransform::Identity).unwrap();
    let logits = out.params.predict(xte.view()).unwrap();
    let preds: Vec<usize> = logits
        .rows()
        .into_iter()
        .map(|r| (0..r.len()).max_by(|&a, &b| r[a].total_cmp(&r[b])).unwrap())
        .collect();
    println!(
        "classification: best epoch {} of {}, test accuracy {:.1}%",
        out.best_epoch,
        out.history.len(),
        metric_accuracy(&preds, &quadrant(&xte)).unwrap()
    );

    let t = TargetTransform::log();
    let tr = ProbeData::new(xtr.clone(), ProbeTargets::Values(norm2(&xtr))).unwrap();
    let va = ProbeData::new(xva.clone(), ProbeTargets::Values(norm2(&xva))).unwrap();
    let out = train(&tr, &va, &hp, &t).unwrap();
    let (pred, _) = t.inverse(out.params.predict(xte.view()).unwrap().view());
    let mape = metric_mape(pred.as_slice().unwrap(), norm2(&xte).as_slice().unwrap()).unwrap();
    println!(
        "regression: best epoch {} of {}, test MAPE {:.1}%",
        out.best_epoch,
        out.history.len(),
        mape.percent
    );
}
