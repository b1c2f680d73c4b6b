use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{DatasetError, TaskDataset};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.80,
            validation: 0.05,
            test: 0.15,
        }
    }
}

impl SplitRatios {
    fn as_array(&self) -> [f64; 3] {
        [self.train, self.validation, self.test]
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        let r = self.as_array();
        if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DatasetError::Config(
                "split ratios must be non-negative".into(),
            ));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(DatasetError::Config(format!(
                "split ratios sum to {sum}, not 1"
            )));
        }
        Ok(())
    }

    /// Per-split counts for `n` items: cumulative rounding, then every split
    /// with a positive ratio gets at least one item.
    fn counts(&self, n: usize) -> [usize; 3] {
        let r = self.as_array();
        let cut1 = (n as f64 * r[0]).round() as usize;
        let cut2 = ((n as f64 * (r[0] + r[1])).round() as usize)
            .max(cut1)
            .min(n);
        let mut c = [cut1.min(n), cut2 - cut1.min(n), n - cut2];
        for k in 0..3 {
            if r[k] > 0.0 && c[k] == 0 {
                let donor = (0..3).max_by_key(|&i| (c[i], usize::MAX - i)).unwrap_or(0);
                if c[donor] > 1 {
                    c[donor] -= 1;
                    c[k] += 1;
                }
            }
        }
        c
    }

    fn positive(&self) -> usize {
        self.as_array().iter().filter(|v| **v > 0.0).count()
    }
}

/// Seeded stratified assignment: within each stratum the examples are
/// shuffled, then cut contiguously into train / validation / test.
pub fn assign_splits(
    strata: &[String],
    ratios: &SplitRatios,
    seed: u64,
) -> Result<Vec<Split>, DatasetError> {
    ratios.validate()?;
    let mut groups: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, s) in strata.iter().enumerate() {
        groups.entry(s.as_str()).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Split::Train; strata.len()];
    for (stratum, mut members) in groups {
        if members.len() < ratios.positive() {
            return Err(DatasetError::Config(format!(
                "class '{stratum}' has {} examples, fewer than the {} splits",
                members.len(),
                ratios.positive()
            )));
        }
        members.shuffle(&mut rng);
        let [train, val, _] = ratios.counts(members.len());
        for (pos, idx) in members.into_iter().enumerate() {
            out[idx] = if pos < train {
                Split::Train
            } else if pos < train + val {
                Split::Validation
            } else {
                Split::Test
            };
        }
    }
    Ok(out)
}

/// Re-splits a dataset; classification tasks are stratified by target class.
pub fn split(
    mut dataset: TaskDataset,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<TaskDataset, DatasetError> {
    let strata: Vec<String> = if dataset.task.is_classification() {
        dataset
            .examples
            .iter()
            .map(|e| e.target.label().unwrap_or_default().to_string())
            .collect()
    } else {
        vec![String::new(); dataset.examples.len()]
    };
    let splits = assign_splits(&strata, ratios, seed)?;
    for (e, s) in dataset.examples.iter_mut().zip(splits) {
        e.split = s;
    }
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Example, Target, TaskId};

    fn dataset(task: TaskId, labels: &[String]) -> TaskDataset {
        TaskDataset {
            task,
            examples: labels
                .iter()
                .enumerate()
                .map(|(i, l)| Example {
                    id: format!("e{i}"),
                    inputs: vec![format!("e{i}")],
                    input_kinds: vec![],
                    target: Target::Label(l.clone()),
                    split: Split::Train,
                })
                .collect(),
        }
    }

    #[test]
    fn hundred_examples_split_80_5_15() {
        let ds = dataset(TaskId::T2, &vec!["x".to_string(); 100]);
        let out = split(ds, &SplitRatios::default(), 7).unwrap();
        assert_eq!(out.split_counts(), [80, 5, 15]);
        out.check_isolation().unwrap();
    }

    #[test]
    fn deterministic_under_seed() {
        let labels: Vec<String> = (0..300).map(|i| format!("c{}", i % 4)).collect();
        let a = split(dataset(TaskId::T1, &labels), &SplitRatios::default(), 3).unwrap();
        let b = split(dataset(TaskId::T1, &labels), &SplitRatios::default(), 3).unwrap();
        assert_eq!(a, b);
        let c = split(dataset(TaskId::T1, &labels), &SplitRatios::default(), 4).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn stratified_proportions_within_two_percent() {
        // Seven unequal classes.
        let sizes = [60, 90, 120, 150, 200, 260, 320];
        let labels: Vec<String> = sizes
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(format!("class{c}"), n))
            .collect();
        let total = labels.len() as f64;
        let out = split(dataset(TaskId::T4, &labels), &SplitRatios::default(), 11).unwrap();
        for s in Split::ALL {
            let members: Vec<&Example> = out.in_split(s).collect();
            let m = members.len() as f64;
            for (c, &n) in sizes.iter().enumerate() {
                let global = n as f64 / total;
                let name = format!("class{c}");
                let local = members
                    .iter()
                    .filter(|e| e.target.label() == Some(name.as_str()))
                    .count() as f64
                    / m;
                assert!(
                    (local - global).abs() <= 0.02,
                    "{s} class{c}: {local} vs {global}"
                );
            }
        }
    }

    #[test]
    fn tiny_class_is_config_error() {
        let labels = vec!["a".to_string(), "a".to_string(), "b".to_string()];
        assert!(matches!(
            split(dataset(TaskId::T1, &labels), &SplitRatios::default(), 1),
            Err(DatasetError::Config(_))
        ));
    }

    #[test]
    fn every_split_gets_a_member() {
        let labels = vec!["a".to_string(); 3];
        let out = split(dataset(TaskId::T1, &labels), &SplitRatios::default(), 1).unwrap();
        assert_eq!(out.split_counts(), [1, 1, 1]);
    }

    #[test]
    fn bad_ratios_rejected() {
        let r = SplitRatios {
            train: 0.8,
            validation: 0.1,
            test: 0.2,
        };
        assert!(r.validate().is_err());
    }
}
