//! DE-9IM intersection matrices for Point / LineString / Polygon pairs.
//!
//! Both geometries are noded against each other: every edge is split at the
//! points where the other geometry's linework meets it. Each sub-edge midpoint
//! and each node is then located in the other geometry, which fixes the 0- and
//! 1-dimensional cells. Area cells follow from which side of a ring sub-edge
//! the polygon interior lies on.

use std::fmt;
use std::str::FromStr;

use crate::geometry::{Coordinate, Geometry, GeometryKind, Polygon};

use super::primitives::{
    intersection_points, on_segment, orient_sign, point_in_ring, ring_twice_signed_area,
    segments_intersect,
};
use super::AlgorithmError;

/// Sub-edges shorter than this (in degrees) are merged into their neighbours.
const MIN_SUBEDGE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Location {
    Interior = 0,
    Boundary = 1,
    Exterior = 2,
}

impl Location {
    pub const ALL: [Location; 3] = [Location::Interior, Location::Boundary, Location::Exterior];
}

/// Dimension of one intersection cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    Empty,
    Zero,
    One,
    Two,
}

impl Dimension {
    pub fn as_char(self) -> char {
        match self {
            Dimension::Empty => 'F',
            Dimension::Zero => '0',
            Dimension::One => '1',
            Dimension::Two => '2',
        }
    }

    fn from_char(c: char) -> Option<Self> {
        match c {
            'F' | 'f' => Some(Dimension::Empty),
            '0' => Some(Dimension::Zero),
            '1' => Some(Dimension::One),
            '2' => Some(Dimension::Two),
            _ => None,
        }
    }
}

/// 3x3 matrix; rows are the subject's interior/boundary/exterior and columns
/// the object's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct De9im {
    cells: [[Dimension; 3]; 3],
}

impl De9im {
    fn empty() -> Self {
        let mut cells = [[Dimension::Empty; 3]; 3];
        cells[2][2] = Dimension::Two;
        Self { cells }
    }

    pub fn get(&self, row: Location, col: Location) -> Dimension {
        self.cells[row as usize][col as usize]
    }

    fn raise(&mut self, row: Location, col: Location, dim: Dimension) {
        let cell = &mut self.cells[row as usize][col as usize];
        if dim > *cell {
            *cell = dim;
        }
    }

    pub fn transpose(&self) -> Self {
        let mut cells = self.cells;
        for (r, row) in cells.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = self.cells[c][r];
            }
        }
        Self { cells }
    }

    /// Matches a 9-character pattern over `{T, F, *, 0, 1, 2}`.
    pub fn matches(&self, pattern: &str) -> bool {
        let chars: Vec<char> = pattern.chars().collect();
        assert_eq!(chars.len(), 9, "DE-9IM pattern must have 9 characters");
        chars.iter().enumerate().all(|(i, &p)| {
            let cell = self.cells[i / 3][i % 3];
            match p {
                '*' => true,
                'T' | 't' => cell != Dimension::Empty,
                other => Dimension::from_char(other) == Some(cell),
            }
        })
    }
}

impl fmt::Display for De9im {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            for cell in row {
                write!(f, "{}", cell.as_char())?;
            }
        }
        Ok(())
    }
}

impl FromStr for De9im {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 9 {
            return Err(format!("expected 9 cells, got {}", chars.len()));
        }
        let mut cells = [[Dimension::Empty; 3]; 3];
        for (i, c) in chars.into_iter().enumerate() {
            cells[i / 3][i % 3] =
                Dimension::from_char(c).ok_or_else(|| format!("invalid cell '{c}'"))?;
        }
        Ok(Self { cells })
    }
}

/// Location of a point relative to a geometry.
///
/// A non-closed linestring's boundary is its two endpoints; a polygon's
/// boundary is its rings.
pub fn locate(p: Coordinate, g: &Geometry) -> Location {
    match g {
        Geometry::Point(c) => {
            if p == *c {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
        Geometry::LineString(l) => {
            let coords = l.coords();
            if !l.is_closed() && (p == coords[0] || p == coords[coords.len() - 1]) {
                return Location::Boundary;
            }
            if coords.windows(2).any(|w| on_segment(p, w[0], w[1])) {
                Location::Interior
            } else {
                Location::Exterior
            }
        }
        Geometry::Polygon(poly) => locate_in_polygon(p, poly),
    }
}

fn locate_in_polygon(p: Coordinate, poly: &Polygon) -> Location {
    if poly
        .rings()
        .flat_map(|r| r.segments())
        .any(|(a, b)| on_segment(p, a, b))
    {
        return Location::Boundary;
    }
    if !point_in_ring(p, poly.exterior().coords()) {
        return Location::Exterior;
    }
    if poly.holes().iter().any(|h| point_in_ring(p, h.coords())) {
        return Location::Exterior;
    }
    Location::Interior
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    a: Coordinate,
    b: Coordinate,
    /// Interior for linestring edges, Boundary for ring edges.
    role: Location,
    /// Ring edges only: the polygon interior lies to the left of `a -> b`.
    interior_left: bool,
}

struct Prepared<'a> {
    geom: &'a Geometry,
    edges: Vec<Edge>,
    vertices: Vec<Coordinate>,
}

impl<'a> Prepared<'a> {
    fn new(geom: &'a Geometry) -> Result<Self, AlgorithmError> {
        let mut edges = Vec::new();
        match geom {
            Geometry::Point(_) => {}
            Geometry::LineString(l) => {
                for w in l.coords().windows(2) {
                    if w[0] != w[1] {
                        edges.push(Edge {
                            a: w[0],
                            b: w[1],
                            role: Location::Interior,
                            interior_left: false,
                        });
                    }
                }
            }
            Geometry::Polygon(p) => {
                check_rings(p)?;
                for (i, ring) in p.rings().enumerate() {
                    let ccw = ring_twice_signed_area(ring.coords()) > 0.0;
                    // Holes have the polygon interior on their outside.
                    let interior_left = if i == 0 { ccw } else { !ccw };
                    for (a, b) in ring.segments() {
                        if a != b {
                            edges.push(Edge {
                                a,
                                b,
                                role: Location::Boundary,
                                interior_left,
                            });
                        }
                    }
                }
            }
        }
        Ok(Self {
            geom,
            edges,
            vertices: geom.coords().collect(),
        })
    }

    fn kind(&self) -> GeometryKind {
        self.geom.kind()
    }

    fn locate(&self, p: Coordinate) -> Location {
        locate(p, self.geom)
    }

    /// Which side of `edge` (left = true) holds this polygon's interior, when
    /// `edge` runs along one of this polygon's ring edges.
    fn interior_left_along(&self, edge_a: Coordinate, edge_b: Coordinate) -> Option<bool> {
        let mid = midpoint(edge_a, edge_b);
        let dx = edge_b.x - edge_a.x;
        let dy = edge_b.y - edge_a.y;
        self.edges
            .iter()
            .find(|f| {
                on_segment(mid, f.a, f.b)
                    && orient_sign(f.a, f.b, edge_a) == 0
                    && orient_sign(f.a, f.b, edge_b) == 0
            })
            .map(|f| {
                let same_dir = dx * (f.b.x - f.a.x) + dy * (f.b.y - f.a.y) > 0.0;
                if same_dir {
                    f.interior_left
                } else {
                    !f.interior_left
                }
            })
    }
}

/// Rejects rings that cross or touch themselves away from adjacent vertices.
fn check_rings(p: &Polygon) -> Result<(), AlgorithmError> {
    for ring in p.rings() {
        let segs: Vec<(Coordinate, Coordinate)> = ring.segments().filter(|(a, b)| a != b).collect();
        let n = segs.len();
        if n < 3 {
            return Err(AlgorithmError::Degenerate(
                "ring with fewer than 3 edges".into(),
            ));
        }
        for i in 0..n {
            let (a, b) = segs[i];
            let (c, d) = segs[(i + 1) % n];
            // Adjacent edges share a vertex; folding back onto itself is a spike.
            if orient_sign(a, b, d) == 0
                && (b.x - a.x) * (d.x - c.x) + (b.y - a.y) * (d.y - c.y) < 0.0
            {
                return Err(AlgorithmError::Degenerate(
                    "ring folds back on itself".into(),
                ));
            }
            for (j, &(c, d)) in segs.iter().enumerate().skip(i + 2) {
                if i == 0 && j == n - 1 {
                    continue;
                }
                if segments_intersect(a, b, c, d) {
                    return Err(AlgorithmError::Degenerate("self-intersecting ring".into()));
                }
            }
        }
    }
    Ok(())
}

#[inline]
fn midpoint(a: Coordinate, b: Coordinate) -> Coordinate {
    Coordinate::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0)
}

/// Splits `edge` at every point where `other` meets it; returns the
/// sub-edges in order along the edge.
fn split_edge(
    edge: &Edge,
    other: &Prepared<'_>,
    nodes: &mut Vec<Coordinate>,
) -> Vec<(Coordinate, Coordinate)> {
    let (a, b) = (edge.a, edge.b);
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    let mut hits = Vec::new();
    for f in &other.edges {
        if !bbox_overlap(a, b, f.a, f.b) {
            continue;
        }
        let before = hits.len();
        intersection_points(a, b, f.a, f.b, &mut hits);
        nodes.extend_from_slice(&hits[before..]);
    }
    if let Geometry::Point(c) = other.geom {
        if on_segment(*c, a, b) {
            hits.push(*c);
        }
    }
    let mut ts: Vec<(f64, Coordinate)> = hits
        .into_iter()
        .map(|p| (((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, p))
        .filter(|(t, _)| *t > 0.0 && *t < 1.0)
        .collect();
    ts.sort_by(|x, y| x.0.total_cmp(&y.0));

    let len = len2.sqrt();
    let mut cuts = vec![a];
    let mut last_t = 0.0;
    for (t, p) in ts {
        if (t - last_t) * len >= MIN_SUBEDGE && (1.0 - t) * len >= MIN_SUBEDGE {
            cuts.push(p);
            last_t = t;
        }
    }
    cuts.push(b);
    cuts.windows(2).map(|w| (w[0], w[1])).collect()
}

#[inline]
fn bbox_overlap(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> bool {
    let eps = super::primitives::ORIENTATION_EPS;
    a.x.min(b.x) <= c.x.max(d.x) + eps
        && c.x.min(d.x) <= a.x.max(b.x) + eps
        && a.y.min(b.y) <= c.y.max(d.y) + eps
        && c.y.min(d.y) <= a.y.max(b.y) + eps
}

/// Computes the DE-9IM matrix of `subject` against `object`.
pub fn de9im(subject: &Geometry, object: &Geometry) -> Result<De9im, AlgorithmError> {
    let a = Prepared::new(subject)?;
    let b = Prepared::new(object)?;
    let mut m = De9im::empty();
    let mut nodes: Vec<Coordinate> = Vec::new();

    sweep_edges(&a, &b, false, &mut m, &mut nodes);
    sweep_edges(&b, &a, true, &mut m, &mut nodes);

    nodes.extend_from_slice(&a.vertices);
    nodes.extend_from_slice(&b.vertices);
    for p in nodes {
        m.raise(a.locate(p), b.locate(p), Dimension::Zero);
    }

    match (a.kind(), b.kind()) {
        (GeometryKind::Polygon, GeometryKind::Polygon) => {}
        (GeometryKind::Polygon, _) => {
            m.raise(Location::Interior, Location::Exterior, Dimension::Two)
        }
        (_, GeometryKind::Polygon) => {
            m.raise(Location::Exterior, Location::Interior, Dimension::Two)
        }
        _ => {}
    }
    Ok(m)
}

/// Locates every sub-edge of `this` in `other` and raises the matching cells.
/// `swapped` means `this` is the object (column) geometry.
fn sweep_edges(
    this: &Prepared<'_>,
    other: &Prepared<'_>,
    swapped: bool,
    m: &mut De9im,
    nodes: &mut Vec<Coordinate>,
) {
    let raise = |m: &mut De9im, mine: Location, theirs: Location, dim: Dimension| {
        if swapped {
            m.raise(theirs, mine, dim)
        } else {
            m.raise(mine, theirs, dim)
        }
    };
    let both_areas = this.kind() == GeometryKind::Polygon && other.kind() == GeometryKind::Polygon;
    use Location::*;
    for edge in &this.edges {
        for (s, e) in split_edge(edge, other, nodes) {
            let mid = midpoint(s, e);
            let loc = other.locate(mid);
            raise(m, edge.role, loc, Dimension::One);
            if !both_areas {
                continue;
            }
            match loc {
                Interior => {
                    raise(m, Interior, Interior, Dimension::Two);
                    raise(m, Exterior, Interior, Dimension::Two);
                }
                Exterior => {
                    raise(m, Interior, Exterior, Dimension::Two);
                }
                Boundary => {
                    let other_left = other.interior_left_along(s, e).unwrap_or_else(|| {
                        let probe =
                            Coordinate::new(mid.x - (e.y - s.y) * 1e-3, mid.y + (e.x - s.x) * 1e-3);
                        other.locate(probe) == Interior
                    });
                    let same_side = other_left == edge.interior_left;
                    if same_side {
                        raise(m, Interior, Interior, Dimension::Two);
                    } else {
                        raise(m, Interior, Exterior, Dimension::Two);
                        raise(m, Exterior, Interior, Dimension::Two);
                    }
                }
            }
        }
    }
}
