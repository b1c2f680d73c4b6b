use std::collections::HashSet;

use geoprobe::probe::{
    mean_precision_at_k, metric_accuracy, metric_mape, metric_precision_at_k, metric_rmse,
};

fn set(items: &[&'static str]) -> HashSet<&'static str> {
    items.iter().copied().collect()
}

#[test]
fn accuracy_fixture() {
    let preds = ["a", "b", "c", "a", "b", "c", "a", "b"];
    let targets = ["a", "b", "c", "c", "b", "a", "a", "a"];
    // 5 of 8 correct
    assert_eq!(metric_accuracy(&preds, &targets).unwrap(), 62.5);
    assert_eq!(metric_accuracy(&targets, &targets).unwrap(), 100.0);
}

#[test]
fn mape_fixture() {
    assert_eq!(metric_mape(&[110.0], &[100.0]).unwrap().percent, 10.0);

    // 10 rows, training mean 4 predicted everywhere, two zero-area rows.
    let targets = [1.0, 2.0, 4.0, 8.0, 0.0, 0.0, 16.0, 32.0, 1.0, 2.0];
    let preds = [4.0; 10];
    // |4-y|/y: 3, 1, 0, 0.5, 0.75, 0.875, 3, 1 -> 10.125 over 8 rows
    let m = metric_mape(&preds, &targets).unwrap();
    assert_eq!(m.percent, 126.5625);
    assert_eq!(m.excluded_zero_targets, 2);
    assert_eq!(metric_mape(&targets, &targets).unwrap().percent, 0.0);
    assert!(metric_mape(&[1.0], &[0.0]).is_err());
}

#[test]
fn rmse_fixture() {
    let targets = [0.5, -1.0, 2.0, 3.0, 10.0];
    let preds = [1.5, -2.0, 3.0, 2.0, 14.0];
    // squared errors 1, 1, 1, 1, 16 -> mean 4
    assert_eq!(metric_rmse(&preds, &targets).unwrap(), 2.0);

    // centroid offset by 0.25 degrees in x only, flattened over both ordinates
    let truth = [-89.4, 43.07, -89.3, 43.1];
    let shifted = [-89.4 + 0.25, 43.07, -89.3 + 0.25, 43.1];
    let r = metric_rmse(&shifted, &truth).unwrap();
    assert!((r - 2f64.sqrt() / 8.0).abs() < 1e-15, "{r}");
}

#[test]
fn precision_fixture() {
    let retrieved = ["a", "b", "c", "d", "e"];
    assert_eq!(
        metric_precision_at_k(&retrieved, &set(&["a", "c"]), 5).unwrap(),
        0.4
    );
    assert!(metric_precision_at_k(&retrieved, &set(&["a"]), 6).is_err());

    let queries = vec![
        (vec!["x", "y", "z", "w", "v"], set(&["q"])),
        (vec!["a", "b", "c", "d", "e"], set(&["e"])),
        (
            vec!["a", "b", "c", "d", "e"],
            set(&["a", "b", "c", "d", "e", "f"]),
        ),
    ];
    // 0, 1/5 and 5/5
    assert_eq!(
        mean_precision_at_k(&queries, 5).unwrap(),
        (0.0 + 0.2 + 1.0) / 3.0
    );
}
