use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::{Geometry, GeometryKind};

use super::measure::min_distance;
use super::relate::{de9im, De9im};
use super::AlgorithmError;

/// The eight OGC named spatial predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredicateName {
    Equals,
    Disjoint,
    Intersects,
    Crosses,
    Touches,
    Contains,
    Within,
    Overlaps,
}

impl PredicateName {
    pub const ALL: [PredicateName; 8] = [
        PredicateName::Equals,
        PredicateName::Disjoint,
        PredicateName::Intersects,
        PredicateName::Crosses,
        PredicateName::Touches,
        PredicateName::Contains,
        PredicateName::Within,
        PredicateName::Overlaps,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PredicateName::Equals => "equals",
            PredicateName::Disjoint => "disjoint",
            PredicateName::Intersects => "intersects",
            PredicateName::Crosses => "crosses",
            PredicateName::Touches => "touches",
            PredicateName::Contains => "contains",
            PredicateName::Within => "within",
            PredicateName::Overlaps => "overlaps",
        }
    }
}

impl fmt::Display for PredicateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PredicateName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PredicateName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| format!("unknown predicate '{s}'"))
    }
}

/// A relation label as stored in triplets: a named predicate, or the
/// `disjoint_but_near` relabeling of close disjoint pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationLabel {
    Named(PredicateName),
    DisjointButNear,
}

impl RelationLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationLabel::Named(p) => p.as_str(),
            RelationLabel::DisjointButNear => "disjoint_but_near",
        }
    }

    /// Text used when the label prefixes a WKT string in a relation phrase.
    pub fn phrase(self) -> &'static str {
        match self {
            RelationLabel::Named(p) => p.as_str(),
            RelationLabel::DisjointButNear => "disjoint but near",
        }
    }

    pub fn is_disjoint(self) -> bool {
        matches!(
            self,
            RelationLabel::Named(PredicateName::Disjoint) | RelationLabel::DisjointButNear
        )
    }
}

impl From<PredicateName> for RelationLabel {
    fn from(p: PredicateName) -> Self {
        RelationLabel::Named(p)
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RelationLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "disjoint_but_near" {
            Ok(RelationLabel::DisjointButNear)
        } else {
            s.parse().map(RelationLabel::Named)
        }
    }
}

impl Serialize for RelationLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for RelationLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Evaluates the OGC mask patterns. Crosses and overlaps depend on the
/// dimensions of the two inputs.
pub fn named_predicates(
    m: &De9im,
    kind_i: GeometryKind,
    kind_j: GeometryKind,
) -> BTreeSet<PredicateName> {
    let (di, dj) = (kind_i.dimension(), kind_j.dimension());
    let mut out = BTreeSet::new();
    let disjoint = m.matches("FF*FF****");
    if disjoint {
        out.insert(PredicateName::Disjoint);
        return out;
    }
    out.insert(PredicateName::Intersects);
    if m.matches("T*F**FFF*") {
        out.insert(PredicateName::Equals);
    }
    if m.matches("T*F**F***") {
        out.insert(PredicateName::Within);
    }
    if m.matches("T*****FF*") {
        out.insert(PredicateName::Contains);
    }
    let touches = !(di == 0 && dj == 0)
        && (m.matches("FT*******") || m.matches("F**T*****") || m.matches("F***T****"));
    if touches {
        out.insert(PredicateName::Touches);
    }
    let crosses = if di < dj {
        m.matches("T*T******")
    } else if di > dj {
        m.matches("T*****T**")
    } else if di == 1 {
        m.matches("0********")
    } else {
        false
    };
    if crosses {
        out.insert(PredicateName::Crosses);
    }
    let overlaps = match (di, dj) {
        (0, 0) | (2, 2) => m.matches("T*T***T**"),
        (1, 1) => m.matches("1*T***T**"),
        _ => false,
    };
    if overlaps {
        out.insert(PredicateName::Overlaps);
    }
    out
}

/// Most specific predicate first; pairs that intersect without matching any
/// named mask fall back to `intersects`.
const PRIORITY: [PredicateName; 7] = [
    PredicateName::Equals,
    PredicateName::Within,
    PredicateName::Contains,
    PredicateName::Crosses,
    PredicateName::Overlaps,
    PredicateName::Touches,
    PredicateName::Disjoint,
];

pub fn collapse(predicates: &BTreeSet<PredicateName>) -> PredicateName {
    PRIORITY
        .into_iter()
        .find(|p| predicates.contains(p))
        .unwrap_or(PredicateName::Intersects)
}

/// Single relation label for the ordered pair (subject, object).
pub fn classify_relation(gi: &Geometry, gj: &Geometry) -> Result<PredicateName, AlgorithmError> {
    let m = de9im(gi, gj)?;
    Ok(collapse(&named_predicates(&m, gi.kind(), gj.kind())))
}

/// Disjoint, and no farther apart than `radius` degrees.
pub fn is_disjoint_but_near(
    gi: &Geometry,
    gj: &Geometry,
    radius: f64,
) -> Result<bool, AlgorithmError> {
    if classify_relation(gi, gj)? != PredicateName::Disjoint {
        return Ok(false);
    }
    Ok(min_distance(gi, gj) <= radius)
}
