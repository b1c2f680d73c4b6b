//! Uniform-grid bounding-box index and the spatial join built on it.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::algorithms::min_distance;
use crate::geometry::{Geometry, GeometryRecord};

/// Default grid cell size in degrees.
pub const DEFAULT_CELL: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl BBox {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        debug_assert!(min_x <= max_x && min_y <= max_y, "inverted bbox");
        Self {
            min_x,
            min_y,
            max_x,
            max_y,
        }
    }

    pub fn of(g: &Geometry) -> Self {
        let mut coords = g.coords();
        let first = coords.next().expect("geometry has coordinates");
        let mut b = BBox::new(first.x, first.y, first.x, first.y);
        for c in coords {
            b.min_x = b.min_x.min(c.x);
            b.min_y = b.min_y.min(c.y);
            b.max_x = b.max_x.max(c.x);
            b.max_y = b.max_y.max(c.y);
        }
        b
    }

    pub fn is_valid(&self) -> bool {
        self.min_x <= self.max_x && self.min_y <= self.max_y
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn expand(&self, r: f64) -> Self {
        BBox::new(
            self.min_x - r,
            self.min_y - r,
            self.max_x + r,
            self.max_y + r,
        )
    }

    pub fn intersects(&self, other: &BBox) -> bool {
        self.min_x <= other.max_x
            && other.min_x <= self.max_x
            && self.min_y <= other.max_y
            && other.min_y <= self.max_y
    }
}

type CellKey = (i64, i64);

/// Grid of cells mapping to the records whose bbox overlaps them.
///
/// Boxes are stored unexpanded; a query expands its own box, so one index
/// serves every join radius.
#[derive(Debug, Clone)]
pub struct GridIndex {
    cell: f64,
    cells: HashMap<CellKey, Vec<usize>>,
    bboxes: Vec<BBox>,
    ids: Vec<String>,
}

impl GridIndex {
    pub fn build(records: &[GeometryRecord], cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite(), "cell size must be positive");
        let mut idx = GridIndex {
            cell,
            cells: HashMap::new(),
            bboxes: Vec::with_capacity(records.len()),
            ids: Vec::with_capacity(records.len()),
        };
        for (pos, r) in records.iter().enumerate() {
            let b = BBox::of(&r.geometry);
            let (x0, y0, x1, y1) = idx.cell_range(&b);
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    idx.cells.entry((cx, cy)).or_default().push(pos);
                }
            }
            idx.bboxes.push(b);
            idx.ids.push(r.id.clone());
        }
        idx
    }

    fn cell_range(&self, b: &BBox) -> (i64, i64, i64, i64) {
        let key = |v: f64| (v / self.cell).floor() as i64;
        (key(b.min_x), key(b.min_y), key(b.max_x), key(b.max_y))
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn id(&self, pos: usize) -> &str {
        &self.ids[pos]
    }

    pub fn bbox(&self, pos: usize) -> &BBox {
        &self.bboxes[pos]
    }

    /// Positions (in build order) of every record whose bbox intersects `query`,
    /// sorted ascending.
    pub fn query_bbox(&self, query: &BBox) -> Vec<usize> {
        if self.ids.is_empty() {
            return Vec::new();
        }
        let (x0, y0, x1, y1) = self.cell_range(query);
        let span = (x1 - x0 + 1) as u128 * (y1 - y0 + 1) as u128;
        let mut hits: Vec<usize> = if span > self.cells.len() as u128 {
            self.cells
                .iter()
                .filter(|((cx, cy), _)| (x0..=x1).contains(cx) && (y0..=y1).contains(cy))
                .flat_map(|(_, v)| v.iter().copied())
                .collect()
        } else {
            let mut v = Vec::new();
            for cx in x0..=x1 {
                for cy in y0..=y1 {
                    if let Some(list) = self.cells.get(&(cx, cy)) {
                        v.extend_from_slice(list);
                    }
                }
            }
            v
        };
        hits.sort_unstable();
        hits.dedup();
        hits.retain(|&p| self.bboxes[p].intersects(query));
        hits
    }

    pub fn query_ids(&self, query: &BBox) -> Vec<&str> {
        self.query_bbox(query)
            .into_iter()
            .map(|p| self.ids[p].as_str())
            .collect()
    }
}

pub fn build_index(records: &[GeometryRecord], cell: f64) -> GridIndex {
    GridIndex::build(records, cell)
}

/// Slack added to the radius when expanding query boxes, so rounding in the
/// distance computation can never drop a true pair.
fn query_radius(radius: f64) -> f64 {
    radius * (1.0 + 1e-9) + 1e-12
}

/// Positions `(subject, object)` of every pair with `min_distance <= radius`,
/// ordered by subject then object position.
pub fn join_positions(
    subjects: &[GeometryRecord],
    objects: &[GeometryRecord],
    objects_index: &GridIndex,
    radius: f64,
) -> Vec<(usize, usize)> {
    assert!(radius >= 0.0, "join radius must be non-negative");
    let mut out = Vec::new();
    for (si, s) in subjects.iter().enumerate() {
        let q = BBox::of(&s.geometry).expand(query_radius(radius));
        for oi in objects_index.query_bbox(&q) {
            if min_distance(&s.geometry, &objects[oi].geometry) <= radius {
                out.push((si, oi));
            }
        }
    }
    out
}

/// Pairs of ids whose geometries lie within `radius` degrees of each other
/// (`radius = 0` is an intersection join).
pub fn join_pairs(
    subjects: &[GeometryRecord],
    objects: &[GeometryRecord],
    radius: f64,
) -> Vec<(String, String)> {
    let idx = GridIndex::build(objects, DEFAULT_CELL);
    join_positions(subjects, objects, &idx, radius)
        .into_iter()
        .map(|(s, o)| (subjects[s].id.clone(), objects[o].id.clone()))
        .collect()
}
