use std::cmp::Ordering;

use std::str::FromStr;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::EvalError;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    #[default]
    Cosine,
    /// Negative Euclidean distance.
    Euclidean,
}

impl FromStr for Similarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(Similarity::Cosine),
            "euclidean" => Ok(Similarity::Euclidean),
            _ => Err(format!(
                "unknown similarity '{s}' (expected cosine or euclidean)"
            )),
        }
    }
}

/// Rows searched by similarity; under cosine they are stored unit-normalized.
#[derive(Debug, Clone)]
pub struct VectorIndex {
    ids: Vec<String>,
    rows: Vec<Array1<f64>>,
    dim: usize,
    similarity: Similarity,
}

fn normalized(v: &[f64]) -> Option<Array1<f64>> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 0.0 && norm.is_finite()).then(|| Array1::from_iter(v.iter().map(|x| x / norm)))
}

impl VectorIndex {
    pub fn new(dim: usize) -> Self {
        Self::with_similarity(dim, Similarity::Cosine)
    }

    pub fn with_similarity(dim: usize, similarity: Similarity) -> Self {
        Self {
            ids: Vec::new(),
            rows: Vec::new(),
            dim,
            similarity,
        }
    }

    fn prepare(&self, v: &[f64]) -> Option<Array1<f64>> {
        match self.similarity {
            Similarity::Cosine => normalized(v),
            Similarity::Euclidean => v
                .iter()
                .all(|x| x.is_finite())
                .then(|| Array1::from_iter(v.iter().copied())),
        }
    }

    fn score(&self, row: &Array1<f64>, q: &Array1<f64>) -> f64 {
        match self.similarity {
            Similarity::Cosine => row.dot(q),
            Similarity::Euclidean => -(row - q).mapv(|d| d * d).sum().sqrt(),
        }
    }

    /// Adds one vector. Under cosine, zero or non-finite vectors have no
    /// direction and are rejected.
    pub fn insert(&mut self, id: &str, v: &[f64]) -> Result<(), EvalError> {
        if v.len() != self.dim {
            return Err(EvalError::Probe(
                crate::probe::ProbeError::DimensionMismatch(self.dim, v.len()),
            ));
        }
        let row = self
            .prepare(v)
            .ok_or_else(|| EvalError::ZeroVector(id.to_string()))?;
        self.ids.push(id.to_string());
        self.rows.push(row);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    /// Rows as a matrix, in insertion order.
    pub fn matrix(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.len(), self.dim));
        for (mut r, v) in m.rows_mut().into_iter().zip(&self.rows) {
            r.assign(v);
        }
        m
    }

    /// The `k` most similar ids, best first; equal scores are ordered
    /// by ascending id.
    pub fn top_k(&self, query: &[f64], k: usize) -> Result<Vec<(String, f64)>, EvalError> {
        if self.is_empty() {
            return Err(EvalError::EmptyPool);
        }
        if query.len() != self.dim {
            return Err(EvalError::Probe(
                crate::probe::ProbeError::DimensionMismatch(self.dim, query.len()),
            ));
        }
        let q = self
            .prepare(query)
            .ok_or_else(|| EvalError::ZeroVector("query".into()))?;
        let mut scored: Vec<(usize, f64)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| (i, self.score(r, &q)))
            .collect();
        scored.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .unwrap_or(Ordering::Equal)
                .then_with(|| self.ids[a.0].cmp(&self.ids[b.0]))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(i, s)| (self.ids[i].clone(), s))
            .collect())
    }
}
