//! Segment-level kernels shared by the measures and the relate engine.

use crate::geometry::Coordinate;

/// Absolute tolerance on the orientation determinant, in squared degrees.
pub const ORIENTATION_EPS: f64 = 1e-12;

/// Twice the signed area of triangle `abc`; positive when counter-clockwise.
#[inline]
pub fn orient(a: Coordinate, b: Coordinate, c: Coordinate) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

#[inline]
pub fn orient_sign(a: Coordinate, b: Coordinate, c: Coordinate) -> i8 {
    let o = orient(a, b, c);
    if o > ORIENTATION_EPS {
        1
    } else if o < -ORIENTATION_EPS {
        -1
    } else {
        0
    }
}

#[inline]
fn within_span(v: f64, a: f64, b: f64) -> bool {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    v >= lo - ORIENTATION_EPS && v <= hi + ORIENTATION_EPS
}

/// True when `p` lies on the closed segment `ab`.
#[inline]
pub fn on_segment(p: Coordinate, a: Coordinate, b: Coordinate) -> bool {
    orient_sign(a, b, p) == 0 && within_span(p.x, a.x, b.x) && within_span(p.y, a.y, b.y)
}

/// True when the interiors of `ab` and `cd` cross at a single point that is
/// not an endpoint of either segment.
#[inline]
pub fn crosses_properly(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> bool {
    let o1 = orient_sign(a, b, c);
    let o2 = orient_sign(a, b, d);
    let o3 = orient_sign(c, d, a);
    let o4 = orient_sign(c, d, b);
    o1 * o2 < 0 && o3 * o4 < 0
}

/// Crossing point of two properly crossing segments.
pub fn crossing_point(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> Coordinate {
    let oa = orient(c, d, a);
    let ob = orient(c, d, b);
    let t = oa / (oa - ob);
    Coordinate::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

pub fn segments_intersect(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> bool {
    crosses_properly(a, b, c, d)
        || on_segment(c, a, b)
        || on_segment(d, a, b)
        || on_segment(a, c, d)
        || on_segment(b, c, d)
}

/// Points where segment `cd` meets segment `ab`: the crossing point, or the
/// endpoints of either segment that lie on the other.
pub fn intersection_points(
    a: Coordinate,
    b: Coordinate,
    c: Coordinate,
    d: Coordinate,
    out: &mut Vec<Coordinate>,
) {
    if crosses_properly(a, b, c, d) {
        out.push(crossing_point(a, b, c, d));
        return;
    }
    for (p, s0, s1) in [(c, a, b), (d, a, b), (a, c, d), (b, c, d)] {
        if on_segment(p, s0, s1) {
            out.push(p);
        }
    }
}

#[inline]
pub fn point_distance(a: Coordinate, b: Coordinate) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

pub fn point_segment_distance(p: Coordinate, a: Coordinate, b: Coordinate) -> f64 {
    if on_segment(p, a, b) {
        return 0.0;
    }
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return point_distance(p, a);
    }
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    if t <= 0.0 {
        point_distance(p, a)
    } else if t >= 1.0 {
        point_distance(p, b)
    } else {
        point_distance(p, Coordinate::new(a.x + t * dx, a.y + t * dy))
    }
}

pub fn segment_distance(a: Coordinate, b: Coordinate, c: Coordinate, d: Coordinate) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Crossing-number test; the caller has already ruled out `p` lying on the ring.
pub fn point_in_ring(p: Coordinate, ring: &[Coordinate]) -> bool {
    let mut inside = false;
    for w in ring.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Twice the signed ring area, computed relative to the first vertex.
pub fn ring_twice_signed_area(ring: &[Coordinate]) -> f64 {
    let o = ring[0];
    let mut sum = 0.0;
    for w in ring.windows(2) {
        let (ax, ay) = (w[0].x - o.x, w[0].y - o.y);
        let (bx, by) = (w[1].x - o.x, w[1].y - o.y);
        sum += ax * by - bx * ay;
    }
    sum
}
