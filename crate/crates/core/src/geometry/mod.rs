//! Canonical geometry model for the three supported WKT types.
//!
//! Geometries are immutable once built. Constructors check the structural
//! invariants (finite coordinates, minimum vertex counts, closed rings) so the
//! rest of the crate can rely on them without re-validating.

mod io;
mod wkt;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use io::{
    read_geojson, read_geojson_str, read_wkt_lines, read_wkt_lines_str, write_wkt_lines,
    write_wkt_lines_string, IoError,
};
pub use wkt::{format_wkt, parse_wkt, WktError};

/// A planar coordinate: `x` is longitude and `y` latitude, both in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coordinate {
    pub x: f64,
    pub y: f64,
}

impl Coordinate {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Bitwise equality, used for ring closure.
    pub fn same_bits(&self, other: &Coordinate) -> bool {
        self.x.to_bits() == other.x.to_bits() && self.y.to_bits() == other.y.to_bits()
    }
}

impl From<(f64, f64)> for Coordinate {
    fn from((x, y): (f64, f64)) -> Self {
        Self { x, y }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("non-finite coordinate ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("linestring needs at least 2 coordinates, got {0}")]
    TooFewLineCoordinates(usize),
    #[error("polygon ring needs at least 4 coordinates, got {0}")]
    TooFewRingCoordinates(usize),
    #[error("polygon ring is not closed")]
    UnclosedRing,
}

/// The three geometry kinds covered by the probing tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeometryKind {
    Point,
    LineString,
    Polygon,
}

impl GeometryKind {
    pub const ALL: [GeometryKind; 3] = [
        GeometryKind::Point,
        GeometryKind::LineString,
        GeometryKind::Polygon,
    ];

    /// Topological dimension: 0, 1 or 2.
    pub fn dimension(self) -> u8 {
        match self {
            GeometryKind::Point => 0,
            GeometryKind::LineString => 1,
            GeometryKind::Polygon => 2,
        }
    }

    pub fn index(self) -> usize {
        self.dimension() as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GeometryKind::Point => "Point",
            GeometryKind::LineString => "LineString",
            GeometryKind::Polygon => "Polygon",
        }
    }
}

impl fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GeometryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "point" => Ok(GeometryKind::Point),
            "linestring" => Ok(GeometryKind::LineString),
            "polygon" => Ok(GeometryKind::Polygon),
            other => Err(format!("unknown geometry kind '{other}'")),
        }
    }
}

/// An ordered path of at least two coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LineString(Vec<Coordinate>);

impl LineString {
    pub fn new(coords: Vec<Coordinate>) -> Result<Self, GeometryError> {
        check_finite(&coords)?;
        if coords.len() < 2 {
            return Err(GeometryError::TooFewLineCoordinates(coords.len()));
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.0
    }

    /// A linestring whose first and last coordinates coincide has no boundary.
    pub fn is_closed(&self) -> bool {
        self.0[0].same_bits(&self.0[self.0.len() - 1])
    }
}

/// A closed ring: at least four coordinates, first equals last bitwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring(Vec<Coordinate>);

impl Ring {
    pub fn new(coords: Vec<Coordinate>) -> Result<Self, GeometryError> {
        check_finite(&coords)?;
        if coords.len() < 4 {
            return Err(GeometryError::TooFewRingCoordinates(coords.len()));
        }
        if !coords[0].same_bits(&coords[coords.len() - 1]) {
            return Err(GeometryError::UnclosedRing);
        }
        Ok(Self(coords))
    }

    pub fn coords(&self) -> &[Coordinate] {
        &self.0
    }

    /// Consecutive vertex pairs, including the closing segment.
    pub fn segments(&self) -> impl Iterator<Item = (Coordinate, Coordinate)> + '_ {
        self.0.windows(2).map(|w| (w[0], w[1]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polygon {
    exterior: Ring,
    holes: Vec<Ring>,
}

impl Polygon {
    pub fn new(exterior: Ring, holes: Vec<Ring>) -> Self {
        Self { exterior, holes }
    }

    pub fn exterior(&self) -> &Ring {
        &self.exterior
    }

    pub fn holes(&self) -> &[Ring] {
        &self.holes
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }
}

/// A geometry instance: exactly one of the three supported kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Point(Coordinate),
    LineString(LineString),
    Polygon(Polygon),
}

impl Geometry {
    pub fn point(x: f64, y: f64) -> Result<Self, GeometryError> {
        let c = Coordinate::new(x, y);
        check_finite(std::slice::from_ref(&c))?;
        Ok(Geometry::Point(c))
    }

    pub fn line_string<C: Into<Coordinate>>(
        coords: impl IntoIterator<Item = C>,
    ) -> Result<Self, GeometryError> {
        LineString::new(coords.into_iter().map(Into::into).collect()).map(Geometry::LineString)
    }

    pub fn polygon<C: Into<Coordinate>>(
        exterior: impl IntoIterator<Item = C>,
        holes: Vec<Vec<Coordinate>>,
    ) -> Result<Self, GeometryError> {
        let exterior = Ring::new(exterior.into_iter().map(Into::into).collect())?;
        let holes = holes
            .into_iter()
            .map(Ring::new)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Geometry::Polygon(Polygon::new(exterior, holes)))
    }

    /// Axis-aligned rectangle, counter-clockwise from the lower-left corner.
    pub fn rectangle(
        min_x: f64,
        min_y: f64,
        max_x: f64,
        max_y: f64,
    ) -> Result<Self, GeometryError> {
        Geometry::polygon(
            [
                (min_x, min_y),
                (max_x, min_y),
                (max_x, max_y),
                (min_x, max_y),
                (min_x, min_y),
            ],
            Vec::new(),
        )
    }

    pub fn kind(&self) -> GeometryKind {
        match self {
            Geometry::Point(_) => GeometryKind::Point,
            Geometry::LineString(_) => GeometryKind::LineString,
            Geometry::Polygon(_) => GeometryKind::Polygon,
        }
    }

    /// Every vertex of the geometry, ring closures included.
    pub fn coords(&self) -> Box<dyn Iterator<Item = Coordinate> + '_> {
        match self {
            Geometry::Point(c) => Box::new(std::iter::once(*c)),
            Geometry::LineString(l) => Box::new(l.coords().iter().copied()),
            Geometry::Polygon(p) => Box::new(p.rings().flat_map(|r| r.coords().iter().copied())),
        }
    }

    pub fn first_coord(&self) -> Coordinate {
        match self {
            Geometry::Point(c) => *c,
            Geometry::LineString(l) => l.coords()[0],
            Geometry::Polygon(p) => p.exterior().coords()[0],
        }
    }

    pub fn to_wkt(&self) -> String {
        format_wkt(self)
    }
}

impl fmt::Display for Geometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_wkt(self))
    }
}

impl FromStr for Geometry {
    type Err = WktError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_wkt(s)
    }
}

/// A geometry with its identity and provenance tag.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryRecord {
    pub id: String,
    pub geometry: Geometry,
    /// Free-form tag such as `poi`, `link`, `footprint` or `synthetic`.
    pub source: String,
}

impl GeometryRecord {
    pub fn new(id: impl Into<String>, geometry: Geometry, source: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            geometry,
            source: source.into(),
        }
    }

    pub fn kind(&self) -> GeometryKind {
        self.geometry.kind()
    }
}

fn check_finite(coords: &[Coordinate]) -> Result<(), GeometryError> {
    match coords.iter().find(|c| !c.is_finite()) {
        Some(c) => Err(GeometryError::NonFinite(c.x, c.y)),
        None => Ok(()),
    }
}
