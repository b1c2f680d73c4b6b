//! Tab-separated dataset files. Floats are written with Rust's shortest
//! round-trip formatting, so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::algorithms::{GeometryAttributeRecord, RelationTriplet};
use crate::geometry::{Coordinate, GeometryKind, IoError};

use super::{DatasetError, Example, LocationQuery, Split, Target, TaskDataset, TaskId};

fn write_file(path: &Path, text: &str) -> Result<(), DatasetError> {
    fs::write(path, text).map_err(|source| {
        DatasetError::Io(IoError::File {
            path: path.display().to_string(),
            source,
        })
    })
}

fn read_file(path: &Path) -> Result<String, DatasetError> {
    fs::read_to_string(path).map_err(|source| {
        DatasetError::Io(IoError::File {
            path: path.display().to_string(),
            source,
        })
    })
}

/// Non-blank lines split on tabs, each checked for the expected field count.
fn rows<'a>(
    path: &'a Path,
    text: &'a str,
    fields: usize,
) -> impl Iterator<Item = Result<(usize, Vec<&'a str>), DatasetError>> + 'a {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(move |(i, l)| {
            let cols: Vec<&str> = l.split('\t').collect();
            if cols.len() != fields {
                return Err(parse_error(
                    path,
                    i + 1,
                    format!("expected {fields} fields, found {}", cols.len()),
                ));
            }
            Ok((i + 1, cols))
        })
}

fn parse_error(path: &Path, line: usize, msg: impl Into<String>) -> DatasetError {
    DatasetError::Parse {
        file: path.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn field<T: FromStr>(path: &Path, line: usize, s: &str, what: &str) -> Result<T, DatasetError> {
    s.parse()
        .map_err(|_| parse_error(path, line, format!("bad {what} '{s}'")))
}

fn list(s: &str) -> Vec<String> {
    if s.is_empty() {
        Vec::new()
    } else {
        s.split(',').map(str::to_string).collect()
    }
}

pub fn write_attributes(path: &Path, rows: &[GeometryAttributeRecord]) -> Result<(), DatasetError> {
    let mut out = String::new();
    for a in rows {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            a.id, a.geom_type, a.area, a.centroid.x, a.centroid.y
        );
    }
    write_file(path, &out)
}

pub fn read_attributes(path: &Path) -> Result<Vec<GeometryAttributeRecord>, DatasetError> {
    let text = read_file(path)?;
    rows(path, &text, 5)
        .map(|r| {
            let (n, c) = r?;
            Ok(GeometryAttributeRecord {
                id: c[0].to_string(),
                geom_type: field(path, n, c[1], "geometry type")?,
                area: field(path, n, c[2], "area")?,
                centroid: Coordinate::new(
                    field(path, n, c[3], "centroid x")?,
                    field(path, n, c[4], "centroid y")?,
                ),
            })
        })
        .collect()
}

pub fn write_triplets(path: &Path, triplets: &[RelationTriplet]) -> Result<(), DatasetError> {
    let mut out = String::new();
    for t in triplets {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            t.subject_id, t.predicate, t.object_id, t.distance
        );
    }
    write_file(path, &out)
}

pub fn read_triplets(path: &Path) -> Result<Vec<RelationTriplet>, DatasetError> {
    let text = read_file(path)?;
    rows(path, &text, 4)
        .map(|r| {
            let (n, c) = r?;
            Ok(RelationTriplet {
                subject_id: c[0].to_string(),
                predicate: field(path, n, c[1], "predicate")?,
                object_id: c[2].to_string(),
                distance: field(path, n, c[3], "distance")?,
            })
        })
        .collect()
}

fn format_target(t: &Target) -> String {
    match t {
        Target::Label(s) => s.clone(),
        Target::Value(v) => v.to_string(),
        Target::Coord(x, y) => format!("{x},{y}"),
    }
}

fn parse_target(task: TaskId, s: &str) -> Option<Target> {
    match task {
        TaskId::T1 | TaskId::T4 => Some(Target::Label(s.to_string())),
        TaskId::T2 | TaskId::T5 => s.parse().ok().map(Target::Value),
        TaskId::T3 => {
            let (x, y) = s.split_once(',')?;
            Some(Target::Coord(x.parse().ok()?, y.parse().ok()?))
        }
        TaskId::T6 => None,
    }
}

/// One example per line: id, comma-joined input ids, comma-joined input
/// kinds, target, split.
pub fn write_task_dataset(path: &Path, ds: &TaskDataset) -> Result<(), DatasetError> {
    let mut out = String::new();
    for e in &ds.examples {
        let kinds: Vec<&str> = e.input_kinds.iter().map(|k| k.as_str()).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            e.id,
            e.inputs.join(","),
            kinds.join(","),
            format_target(&e.target),
            e.split
        );
    }
    write_file(path, &out)
}

pub fn read_task_dataset(path: &Path, task: TaskId) -> Result<TaskDataset, DatasetError> {
    let text = read_file(path)?;
    let examples = rows(path, &text, 5)
        .map(|r| {
            let (n, c) = r?;
            let input_kinds = list(c[2])
                .iter()
                .map(|k| field::<GeometryKind>(path, n, k, "geometry type"))
                .collect::<Result<Vec<_>, _>>()?;
            let inputs = list(c[1]);
            if inputs.len() != input_kinds.len() {
                return Err(parse_error(path, n, "input ids and kinds differ in length"));
            }
            Ok(Example {
                id: c[0].to_string(),
                inputs,
                input_kinds,
                target: parse_target(task, c[3])
                    .ok_or_else(|| parse_error(path, n, format!("bad target '{}'", c[3])))?,
                split: field::<Split>(path, n, c[4], "split")?,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(TaskDataset { task, examples })
}

pub fn write_location_queries(path: &Path, queries: &[LocationQuery]) -> Result<(), DatasetError> {
    let mut out = String::new();
    for q in queries {
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}",
            q.object_id,
            q.object_kind,
            q.predicate,
            q.answers.join(",")
        );
    }
    write_file(path, &out)
}

pub fn read_location_queries(path: &Path) -> Result<Vec<LocationQuery>, DatasetError> {
    let text = read_file(path)?;
    rows(path, &text, 4)
        .map(|r| {
            let (n, c) = r?;
            Ok(LocationQuery {
                object_id: c[0].to_string(),
                object_kind: field(path, n, c[1], "geometry type")?,
                predicate: field(path, n, c[2], "predicate")?,
                answers: list(c[3]),
            })
        })
        .collect()
}
