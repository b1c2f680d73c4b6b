//! Dataset construction: synthetic geometry generation, attribute tables,
//! relation triplets with per-category quotas, location-prediction queries,
//! and seeded train/validation/test splits.

mod files;
mod relations;
mod split;
mod synthetic;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algorithms::{AlgorithmError, GeometryAttributeRecord, RelationLabel};
use crate::geometry::{GeometryKind, GeometryRecord, IoError};
use crate::index::{BBox, DEFAULT_CELL};

pub use files::{
    read_attributes, read_location_queries, read_task_dataset, read_triplets, write_attributes,
    write_location_queries, write_task_dataset, write_triplets,
};
pub use relations::{
    build_location_queries, build_location_queries_from, build_relation_triplets,
    build_relation_triplets_from, discover_relations, LocationBuild, RelationCandidates,
    TripletBuild, T4_LABELS,
};
pub use split::{assign_splits, split, Split, SplitRatios};
pub use synthetic::generate_synthetic;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] AlgorithmError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
}

/// Parameters of a dataset build. Defaults follow the published setup:
/// 4,000 samples per type, 400 triplets per category, 200 location objects,
/// more than 5 subjects per object, a 0.003 degree near radius and an
/// 80/5/15 split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BuilderConfig {
    pub bbox: BBox,
    pub samples_per_type: usize,
    pub triplets_per_category: usize,
    pub location_objects_per_category: usize,
    pub min_subjects_per_object: usize,
    pub near_radius: f64,
    pub split: SplitRatios,
    pub seed: u64,
    pub cell_size: f64,
}

impl Default for BuilderConfig {
    fn default() -> Self {
        Self {
            // Madison, Wisconsin
            bbox: BBox::new(-89.55, 43.0, -89.25, 43.15),
            samples_per_type: 4000,
            triplets_per_category: 400,
            location_objects_per_category: 200,
            min_subjects_per_object: 5,
            near_radius: 0.003,
            split: SplitRatios::default(),
            seed: 42,
            cell_size: DEFAULT_CELL,
        }
    }
}

impl BuilderConfig {
    pub fn validate(&self) -> Result<(), DatasetError> {
        let fail = |m: &str| Err(DatasetError::Config(m.to_string()));
        if !self.bbox.is_valid()
            || !self.bbox.width().is_finite()
            || !self.bbox.height().is_finite()
        {
            return fail("bbox must have min <= max on both axes");
        }
        self.split.validate()?;
        if self.triplets_per_category == 0
            || self.location_objects_per_category == 0
            || self.min_subjects_per_object == 0
        {
            return fail("quotas and minimum subject count must be positive");
        }
        if !(self.near_radius > 0.0) || !(self.cell_size > 0.0) {
            return fail("near radius and cell size must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TaskId {
    T1,
    T2,
    T3,
    T4,
    T5,
    T6,
}

impl TaskId {
    pub const ALL: [TaskId; 6] = [
        TaskId::T1,
        TaskId::T2,
        TaskId::T3,
        TaskId::T4,
        TaskId::T5,
        TaskId::T6,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TaskId::T1 => "t1",
            TaskId::T2 => "t2",
            TaskId::T3 => "t3",
            TaskId::T4 => "t4",
            TaskId::T5 => "t5",
            TaskId::T6 => "t6",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            TaskId::T1 => "T1: Geometry type",
            TaskId::T2 => "T2: Area computation",
            TaskId::T3 => "T3: Centroid derivation",
            TaskId::T4 => "T4: Spatial predicate",
            TaskId::T5 => "T5: Distance measure",
            TaskId::T6 => "T6: Location prediction",
        }
    }

    pub fn is_classification(self) -> bool {
        matches!(self, TaskId::T1 | TaskId::T4)
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TaskId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TaskId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown task '{s}' (expected t1..t6)"))
    }
}

/// Supervised target of one example.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Target {
    Label(String),
    Value(f64),
    Coord(f64, f64),
}

impl Target {
    pub fn label(&self) -> Option<&str> {
        match self {
            Target::Label(s) => Some(s),
            _ => None,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            Target::Label(_) => Vec::new(),
            Target::Value(v) => vec![*v],
            Target::Coord(x, y) => vec![*x, *y],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example {
    pub id: String,
    /// Geometry ids feeding the input embedding, in (subject, object) order.
    pub inputs: Vec<String>,
    pub input_kinds: Vec<GeometryKind>,
    pub target: Target,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskDataset {
    pub task: TaskId,
    pub examples: Vec<Example>,
}

impl TaskDataset {
    pub fn split_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for e in &self.examples {
            c[e.split.index()] += 1;
        }
        c
    }

    pub fn in_split(&self, s: Split) -> impl Iterator<Item = &Example> {
        self.examples.iter().filter(move |e| e.split == s)
    }

    /// Fails when an example id appears more than once (and hence possibly in
    /// two splits).
    pub fn check_isolation(&self) -> Result<(), DatasetError> {
        let mut seen = std::collections::HashMap::new();
        for e in &self.examples {
            if let Some(prev) = seen.insert(e.id.as_str(), e.split) {
                return Err(DatasetError::Config(format!(
                    "example '{}' appears twice ({} and {})",
                    e.id, prev, e.split
                )));
            }
        }
        Ok(())
    }
}

/// A T6 query: which subjects stand in `predicate` to `object_id`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocationQuery {
    pub object_id: String,
    pub object_kind: GeometryKind,
    pub predicate: RelationLabel,
    /// Sorted subject ids.
    pub answers: Vec<String>,
}

impl LocationQuery {
    /// Key under which the query's relation-phrase embedding is stored.
    pub fn phrase_id(&self) -> String {
        phrase_id(self.predicate, &self.object_id)
    }
}

pub fn phrase_id(predicate: RelationLabel, object_id: &str) -> String {
    format!("rel:{}:{}", predicate.as_str(), object_id)
}

/// Attribute rows for every record (T1-T3 ground truth).
pub fn build_attribute_table(
    records: &[GeometryRecord],
) -> Result<Vec<GeometryAttributeRecord>, DatasetError> {
    records
        .iter()
        .map(|r| GeometryAttributeRecord::from_record(r).map_err(DatasetError::from))
        .collect()
}

/// T1-T3 datasets over the attribute table, sharing one split stratified by
/// geometry type.
pub fn build_geometry_tasks(
    attributes: &[GeometryAttributeRecord],
    ratios: &SplitRatios,
    seed: u64,
) -> Result<[TaskDataset; 3], DatasetError> {
    let strata: Vec<String> = attributes.iter().map(|a| a.geom_type.to_string()).collect();
    let splits = assign_splits(&strata, ratios, seed)?;
    let make = |task: TaskId, target: &dyn Fn(&GeometryAttributeRecord) -> Target| TaskDataset {
        task,
        examples: attributes
            .iter()
            .zip(&splits)
            .map(|(a, s)| Example {
                id: a.id.clone(),
                inputs: vec![a.id.clone()],
                input_kinds: vec![a.geom_type],
                target: target(a),
                split: *s,
            })
            .collect(),
    };
    Ok([
        make(TaskId::T1, &|a| Target::Label(a.geom_type.to_string())),
        make(TaskId::T2, &|a| Target::Value(a.area)),
        make(TaskId::T3, &|a| Target::Coord(a.centroid.x, a.centroid.y)),
    ])
}

/// T4/T5 datasets over relation triplets, sharing one split stratified by
/// predicate.
pub fn build_relation_tasks(
    triplets: &[crate::algorithms::RelationTriplet],
    kinds: &std::collections::HashMap<String, GeometryKind>,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<[TaskDataset; 2], DatasetError> {
    let strata: Vec<String> = triplets.iter().map(|t| t.predicate.to_string()).collect();
    let splits = assign_splits(&strata, ratios, seed)?;
    let kind_of = |id: &str| {
        kinds
            .get(id)
            .copied()
            .ok_or_else(|| DatasetError::Config(format!("triplet references unknown id '{id}'")))
    };
    let mut t4 = Vec::with_capacity(triplets.len());
    let mut t5 = Vec::with_capacity(triplets.len());
    for (t, s) in triplets.iter().zip(&splits) {
        let base = Example {
            id: format!("{}|{}", t.subject_id, t.object_id),
            inputs: vec![t.subject_id.clone(), t.object_id.clone()],
            input_kinds: vec![kind_of(&t.subject_id)?, kind_of(&t.object_id)?],
            target: Target::Label(t.predicate.to_string()),
            split: *s,
        };
        t5.push(Example {
            target: Target::Value(t.distance),
            ..base.clone()
        });
        t4.push(base);
    }
    Ok([
        TaskDataset {
            task: TaskId::T4,
            examples: t4,
        },
        TaskDataset {
            task: TaskId::T5,
            examples: t5,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::parse_wkt;

    #[test]
    fn default_config_is_valid() {
        BuilderConfig::default().validate().unwrap();
        let bad = BuilderConfig {
            triplets_per_category: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn attribute_table_rows() {
        let recs = vec![
            GeometryRecord::new("p", parse_wkt("POINT (3 4)").unwrap(), "poi"),
            GeometryRecord::new(
                "sq",
                parse_wkt("POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))").unwrap(),
                "footprint",
            ),
        ];
        let table = build_attribute_table(&recs).unwrap();
        assert_eq!(table.len(), 2);
        assert_eq!(table[0].geom_type, GeometryKind::Point);
        assert_eq!(table[0].area, 0.0);
        assert_eq!((table[0].centroid.x, table[0].centroid.y), (3.0, 4.0));
        assert_eq!(table[1].area, 1.0);
        assert_eq!((table[1].centroid.x, table[1].centroid.y), (0.5, 0.5));
    }

    #[test]
    fn task_ids_parse() {
        assert_eq!("T4".parse::<TaskId>().unwrap(), TaskId::T4);
        assert!("t7".parse::<TaskId>().is_err());
    }
}
