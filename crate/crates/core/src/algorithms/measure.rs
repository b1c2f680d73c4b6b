use crate::geometry::{Coordinate, Geometry, Polygon, Ring};

use super::primitives::{
    point_distance, point_segment_distance, ring_twice_signed_area, segment_distance,
};
use super::relate::{locate, Location};
use super::AlgorithmError;

/// Area in square degrees. Points and linestrings have zero area.
pub fn area(g: &Geometry) -> Result<f64, AlgorithmError> {
    match g {
        Geometry::Point(_) | Geometry::LineString(_) => Ok(0.0),
        Geometry::Polygon(p) => polygon_area(p),
    }
}

fn polygon_area(p: &Polygon) -> Result<f64, AlgorithmError> {
    let ring_area = |r: &Ring| ring_twice_signed_area(r.coords()).abs() / 2.0;
    let outer = ring_area(p.exterior());
    let holes: f64 = p.holes().iter().map(ring_area).sum();
    let net = outer - holes;
    if net < 0.0 {
        return Err(AlgorithmError::Degenerate(format!(
            "hole area {holes} exceeds exterior area {outer}"
        )));
    }
    Ok(net)
}

/// Centroid: the point itself, the length-weighted segment midpoint mean of
/// a linestring, or the area-weighted centroid of a polygon minus its holes.
pub fn centroid(g: &Geometry) -> Result<Coordinate, AlgorithmError> {
    match g {
        Geometry::Point(c) => Ok(*c),
        Geometry::LineString(l) => {
            let mut total = 0.0;
            let (mut sx, mut sy) = (0.0, 0.0);
            for w in l.coords().windows(2) {
                let len = point_distance(w[0], w[1]);
                total += len;
                sx += len * (w[0].x + w[1].x) / 2.0;
                sy += len * (w[0].y + w[1].y) / 2.0;
            }
            if total == 0.0 {
                return Err(AlgorithmError::Degenerate("zero-length linestring".into()));
            }
            Ok(Coordinate::new(sx / total, sy / total))
        }
        Geometry::Polygon(p) => polygon_centroid(p),
    }
}

fn polygon_centroid(p: &Polygon) -> Result<Coordinate, AlgorithmError> {
    let origin = p.exterior().coords()[0];
    // Per ring: unsigned area and first moments, relative to `origin`.
    let moments = |r: &Ring| {
        let (mut a2, mut mx, mut my) = (0.0, 0.0, 0.0);
        for w in r.coords().windows(2) {
            let (ax, ay) = (w[0].x - origin.x, w[0].y - origin.y);
            let (bx, by) = (w[1].x - origin.x, w[1].y - origin.y);
            let cross = ax * by - bx * ay;
            a2 += cross;
            mx += (ax + bx) * cross;
            my += (ay + by) * cross;
        }
        let sign = if a2 < 0.0 { -1.0 } else { 1.0 };
        (sign * a2 / 2.0, sign * mx / 6.0, sign * my / 6.0)
    };
    let (mut area, mut mx, mut my) = moments(p.exterior());
    for hole in p.holes() {
        let (ha, hx, hy) = moments(hole);
        area -= ha;
        mx -= hx;
        my -= hy;
    }
    if area <= 0.0 {
        return Err(AlgorithmError::Degenerate("zero-area polygon".into()));
    }
    Ok(Coordinate::new(origin.x + mx / area, origin.y + my / area))
}

/// Minimum Euclidean distance in degrees; zero when the geometries intersect.
pub fn min_distance(a: &Geometry, b: &Geometry) -> f64 {
    let (pa, sa) = primitives_of(a);
    let (pb, sb) = primitives_of(b);
    let mut best = f64::INFINITY;
    for &(s0, s1) in &sa {
        for &(t0, t1) in &sb {
            best = best.min(segment_distance(s0, s1, t0, t1));
            if best == 0.0 {
                return 0.0;
            }
        }
        for &q in &pb {
            best = best.min(point_segment_distance(q, s0, s1));
        }
    }
    for &p in &pa {
        for &(t0, t1) in &sb {
            best = best.min(point_segment_distance(p, t0, t1));
        }
        for &q in &pb {
            best = best.min(point_distance(p, q));
        }
    }
    if best == 0.0 {
        return 0.0;
    }
    // One geometry may sit entirely inside a polygon without touching its rings.
    if matches!(a, Geometry::Polygon(_)) && locate(b.first_coord(), a) != Location::Exterior {
        return 0.0;
    }
    if matches!(b, Geometry::Polygon(_)) && locate(a.first_coord(), b) != Location::Exterior {
        return 0.0;
    }
    best
}

type Segment = (Coordinate, Coordinate);

fn primitives_of(g: &Geometry) -> (Vec<Coordinate>, Vec<Segment>) {
    match g {
        Geometry::Point(c) => (vec![*c], Vec::new()),
        Geometry::LineString(l) => (
            Vec::new(),
            l.coords().windows(2).map(|w| (w[0], w[1])).collect(),
        ),
        Geometry::Polygon(p) => (Vec::new(), p.rings().flat_map(|r| r.segments()).collect()),
    }
}
