//! Shared fixtures: conversion to `geo` types, the oracle classifier and the
//! seeded pair corpus used by the parity and algebra suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use geo::coordinate_position::CoordPos;
use geo::dimensions::Dimensions;
use geo::{Area, Centroid, Distance, Euclidean, Relate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoprobe::algorithms::{PredicateName, RelationLabel};
use geoprobe::dataset::{discover_relations, generate_synthetic, BuilderConfig};
use geoprobe::geometry::{Coordinate, Geometry};

pub mod pipeline_run;
pub mod probe;
pub mod retrieval;
pub mod wkt;

pub fn to_geo(g: &Geometry) -> geo::Geometry<f64> {
    let ring = |cs: &[Coordinate]| {
        geo::LineString::from(cs.iter().map(|c| (c.x, c.y)).collect::<Vec<_>>())
    };
    match g {
        Geometry::Point(c) => geo::Geometry::Point(geo::Point::new(c.x, c.y)),
        Geometry::LineString(l) => geo::Geometry::LineString(ring(l.coords())),
        Geometry::Polygon(p) => geo::Geometry::Polygon(geo::Polygon::new(
            ring(p.exterior().coords()),
            p.holes().iter().map(|h| ring(h.coords())).collect(),
        )),
    }
}

/// DE-9IM string computed by `geo`.
pub fn oracle_matrix(a: &Geometry, b: &Geometry) -> String {
    let m = to_geo(a).relate(&to_geo(b));
    let pos = [CoordPos::Inside, CoordPos::OnBoundary, CoordPos::Outside];
    let mut s = String::new();
    for r in pos {
        for c in pos {
            s.push(match m.get(r, c) {
                Dimensions::Empty => 'F',
                Dimensions::ZeroDimensional => '0',
                Dimensions::OneDimensional => '1',
                Dimensions::TwoDimensional => '2',
            });
        }
    }
    s
}

/// Most specific named predicate according to `geo`'s own predicate
/// evaluation, with the same precedence the library uses.
pub fn oracle_classify(a: &Geometry, b: &Geometry) -> PredicateName {
    let m = to_geo(a).relate(&to_geo(b));
    if m.is_equal_topo() {
        PredicateName::Equals
    } else if m.is_within() {
        PredicateName::Within
    } else if m.is_contains() {
        PredicateName::Contains
    } else if m.is_crosses() {
        PredicateName::Crosses
    } else if m.is_overlaps() {
        PredicateName::Overlaps
    } else if m.is_touches() {
        PredicateName::Touches
    } else if m.is_disjoint() {
        PredicateName::Disjoint
    } else {
        PredicateName::Intersects
    }
}

pub fn oracle_area(g: &Geometry) -> f64 {
    to_geo(g).unsigned_area()
}

pub fn oracle_centroid(g: &Geometry) -> (f64, f64) {
    let c = to_geo(g).centroid().expect("non-empty geometry");
    (c.x(), c.y())
}

pub fn oracle_distance(a: &Geometry, b: &Geometry) -> f64 {
    Euclidean.distance(&to_geo(a), &to_geo(b))
}

const STEP: f64 = 1.0 / 8.0;

fn snap(rng: &mut ChaCha8Rng, lo: i32, hi: i32) -> f64 {
    f64::from(rng.random_range(lo..=hi)) * STEP
}

/// Random geometry on a 1/8 grid: shared vertices, collinear edges and exact
/// touches are frequent.
pub fn random_grid_geometry(rng: &mut ChaCha8Rng) -> Geometry {
    match rng.random_range(0..6) {
        0 => Geometry::point(snap(rng, 0, 8), snap(rng, 0, 8)).unwrap(),
        1 | 2 => {
            let n = rng.random_range(2..=5);
            let mut x = rng.random_range(0..4);
            let mut coords = Vec::new();
            for _ in 0..n {
                coords.push((f64::from(x) * STEP, snap(rng, 0, 8)));
                x += rng.random_range(1..3);
            }
            Geometry::line_string(coords).unwrap()
        }
        3 => {
            let (x0, y0) = (rng.random_range(0..6), rng.random_range(0..6));
            let (w, h) = (rng.random_range(1..4), rng.random_range(1..4));
            let f = |v: i32| f64::from(v) * STEP;
            Geometry::rectangle(f(x0), f(y0), f(x0 + w), f(y0 + h)).unwrap()
        }
        4 => loop {
            let p: Vec<(f64, f64)> = (0..3).map(|_| (snap(rng, 0, 8), snap(rng, 0, 8))).collect();
            let cross =
                (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[1].1 - p[0].1) * (p[2].0 - p[0].0);
            if cross != 0.0 {
                break Geometry::polygon([p[0], p[1], p[2], p[0]], vec![]).unwrap();
            }
        },
        _ => {
            let (x0, y0) = (rng.random_range(0..4), rng.random_range(0..4));
            let f = |v: i32| f64::from(v) * STEP;
            let hole = vec![
                Coordinate::new(f(x0 + 1), f(y0 + 1)),
                Coordinate::new(f(x0 + 1), f(y0 + 3)),
                Coordinate::new(f(x0 + 3), f(y0 + 3)),
                Coordinate::new(f(x0 + 3), f(y0 + 1)),
                Coordinate::new(f(x0 + 1), f(y0 + 1)),
            ];
            Geometry::polygon(
                [
                    (f(x0), f(y0)),
                    (f(x0 + 4), f(y0)),
                    (f(x0 + 4), f(y0 + 4)),
                    (f(x0), f(y0 + 4)),
                    (f(x0), f(y0)),
                ],
                vec![hole],
            )
            .unwrap()
        }
    }
}

/// At least `n` seeded pairs: half drawn from a synthetic city stratified by
/// discovered relation label (plus far pairs), half grid-snapped random pairs.
pub fn pair_corpus(seed: u64, n: usize) -> Vec<(Geometry, Geometry)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = BuilderConfig {
        samples_per_type: 300,
        seed,
        ..Default::default()
    };
    let records = generate_synthetic(&cfg).expect("synthetic corpus");
    let candidates = discover_relations(&records, &cfg);
    let mut by_label: BTreeMap<RelationLabel, Vec<(usize, usize)>> = BTreeMap::new();
    for c in candidates.all() {
        by_label
            .entry(c.label)
            .or_default()
            .push((c.subject, c.object));
    }
    let half = n / 2;
    let per_label = half / (by_label.len() + 1) + 1;
    let mut out = Vec::with_capacity(n + by_label.len());
    for pairs in by_label.values_mut() {
        pairs.shuffle(&mut rng);
        for &(s, o) in pairs.iter().take(per_label) {
            out.push((records[s].geometry.clone(), records[o].geometry.clone()));
        }
    }
    for _ in 0..per_label {
        let s = rng.random_range(0..records.len());
        let o = rng.random_range(0..records.len());
        out.push((records[s].geometry.clone(), records[o].geometry.clone()));
    }
    while out.len() < n {
        let a = random_grid_geometry(&mut rng);
        let b = random_grid_geometry(&mut rng);
        out.push((a, b));
    }
    out
}
