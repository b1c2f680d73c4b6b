//! Ground-truth geometric attributes and spatial relations.

mod measure;
mod predicates;
pub mod primitives;
mod relate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Coordinate, GeometryKind, GeometryRecord};

pub use measure::{area, centroid, min_distance};
pub use predicates::{
    classify_relation, collapse, is_disjoint_but_near, named_predicates, PredicateName,
    RelationLabel,
};
pub use relate::{de9im, locate, De9im, Dimension, Location};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgorithmError {
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
}

/// Type, area and centroid of one geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryAttributeRecord {
    pub id: String,
    pub geom_type: GeometryKind,
    pub area: f64,
    pub centroid: Coordinate,
}

impl GeometryAttributeRecord {
    pub fn from_record(record: &GeometryRecord) -> Result<Self, AlgorithmError> {
        Ok(Self {
            id: record.id.clone(),
            geom_type: record.kind(),
            area: area(&record.geometry)?,
            centroid: centroid(&record.geometry)?,
        })
    }
}

/// (subject, predicate, object) with the pair's minimum distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationTriplet {
    pub subject_id: String,
    pub predicate: RelationLabel,
    pub object_id: String,
    pub distance: f64,
}
