//! Record loaders: tab-separated WKT lines and GeoJSON feature collections.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde_json::Value;
use thiserror::Error;

use super::{parse_wkt, Coordinate, Geometry, GeometryError, GeometryRecord, WktError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("line {line}: {source}")]
    Wkt {
        line: usize,
        #[source]
        source: WktError,
    },
    #[error("duplicate record id '{0}'")]
    DuplicateId(String),
    #[error("invalid id '{0}': ids may not contain tabs, commas or newlines")]
    InvalidId(String),
    #[error("geojson: {0}")]
    GeoJson(String),
}

pub(crate) fn check_id(id: &str) -> Result<(), IoError> {
    if id.is_empty() || id.contains(['\t', '\n', '\r', ',']) {
        return Err(IoError::InvalidId(id.to_string()));
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Parses `<id>\t<wkt>\t<source>` lines. Blank lines are skipped.
pub fn read_wkt_lines_str(text: &str) -> Result<Vec<GeometryRecord>, IoError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(IoError::Line {
                line: line_no,
                msg: format!("expected 3 tab-separated fields, got {}", fields.len()),
            });
        }
        let id = fields[0];
        check_id(id)?;
        let geometry = parse_wkt(fields[1]).map_err(|source| IoError::Wkt {
            line: line_no,
            source,
        })?;
        if !seen.insert(id.to_string()) {
            return Err(IoError::DuplicateId(id.to_string()));
        }
        out.push(GeometryRecord::new(id, geometry, fields[2]));
    }
    Ok(out)
}

pub fn read_wkt_lines(path: &Path) -> Result<Vec<GeometryRecord>, IoError> {
    read_wkt_lines_str(&read_file(path)?)
}

pub fn write_wkt_lines_string(records: &[GeometryRecord]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&r.id);
        out.push('\t');
        out.push_str(&r.geometry.to_wkt());
        out.push('\t');
        out.push_str(&r.source);
        out.push('\n');
    }
    out
}

pub fn write_wkt_lines(path: &Path, records: &[GeometryRecord]) -> Result<(), IoError> {
    fs::write(path, write_wkt_lines_string(records)).map_err(|source| IoError::File {
        path: path.display().to_string(),
        source,
    })
}

/// Loads Point/LineString/Polygon features from a GeoJSON FeatureCollection.
///
/// Ids come from the feature `id` member when present, otherwise the feature
/// index. The record source is `properties.source` when it is a string.
pub fn read_geojson_str(text: &str) -> Result<Vec<GeometryRecord>, IoError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| IoError::GeoJson(e.to_string()))?;
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(IoError::GeoJson("expected a FeatureCollection".into()));
    }
    let features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| IoError::GeoJson("missing 'features' array".into()))?;

    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(features.len());
    for (index, feature) in features.iter().enumerate() {
        let id = match feature.get("id") {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            _ => index.to_string(),
        };
        check_id(&id)?;
        let geometry = feature
            .get("geometry")
            .ok_or_else(|| IoError::GeoJson(format!("feature {index}: missing geometry")))?;
        let geometry = geojson_geometry(geometry)
            .map_err(|msg| IoError::GeoJson(format!("feature {index}: {msg}")))?;
        let source = feature
            .get("properties")
            .and_then(|p| p.get("source"))
            .and_then(Value::as_str)
            .unwrap_or("geojson");
        if !seen.insert(id.clone()) {
            return Err(IoError::DuplicateId(id));
        }
        out.push(GeometryRecord::new(id, geometry, source));
    }
    Ok(out)
}

pub fn read_geojson(path: &Path) -> Result<Vec<GeometryRecord>, IoError> {
    read_geojson_str(&read_file(path)?)
}

fn geojson_geometry(value: &Value) -> Result<Geometry, String> {
    let kind = value
        .get("type")
        .and_then(Value::as_str)
        .ok_or("geometry without 'type'")?;
    let coords = value
        .get("coordinates")
        .ok_or("geometry without 'coordinates'")?;
    let invalid = |e: GeometryError| e.to_string();
    match kind {
        "Point" => {
            let c = position(coords)?;
            Geometry::point(c.x, c.y).map_err(invalid)
        }
        "LineString" => Geometry::line_string(positions(coords)?).map_err(invalid),
        "Polygon" => {
            let rings = coords
                .as_array()
                .ok_or("polygon coordinates must be an array")?;
            if rings.is_empty() {
                return Err("polygon without rings".into());
            }
            let exterior = positions(&rings[0])?;
            let holes = rings[1..]
                .iter()
                .map(positions)
                .collect::<Result<Vec<_>, _>>()?;
            Geometry::polygon(exterior, holes).map_err(invalid)
        }
        other => Err(format!("unsupported geometry type '{other}'")),
    }
}

fn position(value: &Value) -> Result<Coordinate, String> {
    let arr = value.as_array().ok_or("position must be an array")?;
    if arr.len() != 2 {
        return Err(format!("position must have 2 numbers, got {}", arr.len()));
    }
    let x = arr[0].as_f64().ok_or("non-numeric ordinate")?;
    let y = arr[1].as_f64().ok_or("non-numeric ordinate")?;
    Ok(Coordinate::new(x, y))
}

fn positions(value: &Value) -> Result<Vec<Coordinate>, String> {
    value
        .as_array()
        .ok_or("expected an array of positions")?
        .iter()
        .map(position)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryKind;

    #[test]
    fn wkt_lines_round_trip() {
        let text = "a\tPOINT (1 2)\tpoi\nb\tLINESTRING (0 0, 1 1)\tlink\n\nc\tPOLYGON ((0 0, 1 0, 1 1, 0 0))\tfootprint\n";
        let records = read_wkt_lines_str(text).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[1].source, "link");
        let again = read_wkt_lines_str(&write_wkt_lines_string(&records)).unwrap();
        assert_eq!(again, records);
    }

    #[test]
    fn wkt_lines_errors() {
        assert!(matches!(
            read_wkt_lines_str("a\tPOINT (1 2)\n"),
            Err(IoError::Line { line: 1, .. })
        ));
        assert!(matches!(
            read_wkt_lines_str("a\tPOINT (1 2)\tx\na\tPOINT (1 3)\tx\n"),
            Err(IoError::DuplicateId(_))
        ));
        assert!(matches!(
            read_wkt_lines_str("a\tPOINT (1)\tx\n"),
            Err(IoError::Wkt { line: 1, .. })
        ));
        assert!(matches!(
            read_wkt_lines_str("a,b\tPOINT (1 2)\tx\n"),
            Err(IoError::InvalidId(_))
        ));
    }

    #[test]
    fn geojson_feature_collection() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","id":"poi-1","properties":{"source":"poi"},
             "geometry":{"type":"Point","coordinates":[-89.4,43.07]}},
            {"type":"Feature","properties":{},
             "geometry":{"type":"LineString","coordinates":[[0,0],[1,1]]}},
            {"type":"Feature","id":7,"geometry":{"type":"Polygon",
             "coordinates":[[[0,0],[4,0],[4,4],[0,4],[0,0]],[[1,1],[1,2],[2,2],[1,1]]]}}
        ]}"#;
        let records = read_geojson_str(text).unwrap();
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].id, "poi-1");
        assert_eq!(records[0].source, "poi");
        assert_eq!(records[1].id, "1");
        assert_eq!(records[1].source, "geojson");
        assert_eq!(records[2].id, "7");
        assert_eq!(records[2].kind(), GeometryKind::Polygon);
    }

    #[test]
    fn geojson_rejects_multi() {
        let text = r#"{"type":"FeatureCollection","features":[
            {"type":"Feature","geometry":{"type":"MultiPoint","coordinates":[[0,0]]}}]}"#;
        assert!(matches!(read_geojson_str(text), Err(IoError::GeoJson(_))));
    }
}
