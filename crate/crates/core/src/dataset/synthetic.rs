//! Seeded synthetic city: point, road-like linestring and footprint-like
//! polygon records, with correlated placements so that every predicate
//! category is populated.

use std::f64::consts::PI;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::{Coordinate, Geometry, GeometryRecord};
use crate::index::BBox;

use super::{BuilderConfig, DatasetError};

const STEP_MIN: f64 = 0.0003;
const STEP_MAX: f64 = 0.0007;
const EXTENT_MIN: f64 = 0.0005;
const EXTENT_MAX: f64 = 0.005;
/// Rectangles at least this wide on both sides can host nested geometries.
const HOST_MIN: f64 = 0.002;

/// Splits `n` into parts proportional to `weights`; the rounding remainder
/// goes to the first part.
fn allocate<const K: usize>(n: usize, weights: [f64; K]) -> [usize; K] {
    let total: f64 = weights.iter().sum();
    let mut out = [0; K];
    for (o, w) in out.iter_mut().zip(weights) {
        *o = (n as f64 * w / total).floor() as usize;
    }
    let assigned: usize = out.iter().sum();
    out[0] += n - assigned;
    out
}

#[derive(Clone, Copy)]
struct Rect {
    min_x: f64,
    min_y: f64,
    max_x: f64,
    max_y: f64,
}

impl Rect {
    fn geometry(&self) -> Geometry {
        Geometry::rectangle(self.min_x, self.min_y, self.max_x, self.max_y)
            .expect("finite rectangle")
    }

    fn w(&self) -> f64 {
        self.max_x - self.min_x
    }

    fn h(&self) -> f64 {
        self.max_y - self.min_y
    }

    fn is_host(&self) -> bool {
        self.w() >= HOST_MIN && self.h() >= HOST_MIN
    }

    /// Uniform point strictly inside, keeping `margin` (fraction of size) off
    /// the edges.
    fn inner_point(&self, rng: &mut ChaCha8Rng, margin: f64) -> Coordinate {
        Coordinate::new(
            self.min_x + self.w() * rng.random_range(margin..1.0 - margin),
            self.min_y + self.h() * rng.random_range(margin..1.0 - margin),
        )
    }

    fn corners(&self) -> [Coordinate; 4] {
        [
            Coordinate::new(self.min_x, self.min_y),
            Coordinate::new(self.max_x, self.min_y),
            Coordinate::new(self.max_x, self.max_y),
            Coordinate::new(self.min_x, self.max_y),
        ]
    }
}

struct Generator {
    rng: ChaCha8Rng,
    area: BBox,
}

impl Generator {
    fn uniform_point(&mut self) -> Coordinate {
        Coordinate::new(
            self.rng.random_range(self.area.min_x..self.area.max_x),
            self.rng.random_range(self.area.min_y..self.area.max_y),
        )
    }

    fn extent(&mut self) -> f64 {
        self.rng.random_range(EXTENT_MIN..EXTENT_MAX)
    }

    fn step(&mut self) -> f64 {
        self.rng.random_range(STEP_MIN..STEP_MAX)
    }

    fn rect(&mut self) -> Rect {
        let c = self.uniform_point();
        let (w, h) = (self.extent(), self.extent());
        Rect {
            min_x: c.x,
            min_y: c.y,
            max_x: c.x + w,
            max_y: c.y + h,
        }
    }

    /// Convex hull of a small random point cluster.
    fn hull(&mut self) -> Geometry {
        loop {
            let c = self.uniform_point();
            let (w, h) = (self.extent(), self.extent());
            let k = self.rng.random_range(5..=9);
            let pts: Vec<Coordinate> = (0..k)
                .map(|_| {
                    Coordinate::new(
                        c.x + self.rng.random_range(0.0..w),
                        c.y + self.rng.random_range(0.0..h),
                    )
                })
                .collect();
            let mut ring = convex_hull(pts);
            if ring.len() >= 3 {
                ring.push(ring[0]);
                if let Ok(g) = Geometry::polygon(ring, Vec::new()) {
                    return g;
                }
            }
        }
    }

    /// Road-like walk with a slowly turning heading.
    fn walk_from(&mut self, start: Coordinate, heading: f64, vertices: usize) -> Vec<Coordinate> {
        let mut pts = vec![start];
        let mut heading = heading;
        let mut cur = start;
        for _ in 1..vertices {
            heading += self.rng.random_range(-0.6..0.6);
            let s = self.step();
            cur = Coordinate::new(cur.x + s * heading.cos(), cur.y + s * heading.sin());
            pts.push(cur);
        }
        pts
    }

    fn random_walk(&mut self) -> Vec<Coordinate> {
        let start = self.uniform_point();
        let heading = self.rng.random_range(0.0..2.0 * PI);
        let n = self.rng.random_range(2..=20);
        self.walk_from(start, heading, n)
    }
}

/// Andrew's monotone chain, counter-clockwise, without the closing vertex.
fn convex_hull(mut pts: Vec<Coordinate>) -> Vec<Coordinate> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Coordinate, a: Coordinate, b: Coordinate| {
        (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
    };
    let mut lower: Vec<Coordinate> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Coordinate> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Copies of random originals, in groups of 1-7 copies per original.
fn duplicates(
    rng: &mut ChaCha8Rng,
    originals: &[(Geometry, &'static str)],
    count: usize,
) -> Vec<(Geometry, &'static str)> {
    let mut out = Vec::with_capacity(count);
    if originals.is_empty() {
        return out;
    }
    while out.len() < count {
        let (g, _) = originals.choose(rng).expect("non-empty");
        let copies = rng.random_range(1..=7usize).min(count - out.len());
        for _ in 0..copies {
            out.push((g.clone(), "duplicate"));
        }
    }
    out
}

/// Generates `samples_per_type` records of each geometry type inside the
/// configured bbox. Identical configs give identical output.
pub fn generate_synthetic(cfg: &BuilderConfig) -> Result<Vec<GeometryRecord>, DatasetError> {
    let n = cfg.samples_per_type;
    if n == 0 {
        return Ok(Vec::new());
    }
    let b = cfg.bbox;
    if !b.is_valid() {
        return Err(DatasetError::Config("invalid bbox".into()));
    }
    let min_side = 4.0 * EXTENT_MAX + 2.0 * 20.0 * STEP_MAX;
    // Room for at least a smallest-footprint square per sample and type.
    let footprint = 3.0 * n as f64 * EXTENT_MIN * EXTENT_MIN;
    if b.width() < min_side || b.height() < min_side || b.width() * b.height() < footprint {
        return Err(DatasetError::Config(format!(
            "bbox {:.4}x{:.4} degrees is too small for {n} samples per type",
            b.width(),
            b.height()
        )));
    }
    // Keep generated shapes well inside the box.
    let margin = 2.0 * EXTENT_MAX;
    let mut gen = Generator {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        area: BBox::new(
            b.min_x + margin,
            b.min_y + margin,
            b.max_x - margin,
            b.max_y - margin,
        ),
    };

    // Polygons.
    let [pg_dup, pg_rect, pg_hull, pg_touch, pg_overlap, pg_nested] =
        allocate(n, [0.12, 0.36, 0.12, 0.14, 0.12, 0.14]);
    let mut polygons: Vec<(Geometry, &'static str)> = Vec::with_capacity(n);
    let mut rects: Vec<Rect> = (0..pg_rect).map(|_| gen.rect()).collect();
    // Guarantee some hosts for the correlated placements below.
    for r in rects.iter_mut().step_by(3) {
        r.max_x = r.max_x.max(r.min_x + HOST_MIN + 0.001);
        r.max_y = r.max_y.max(r.min_y + HOST_MIN + 0.001);
    }
    let hosts: Vec<Rect> = rects.iter().copied().filter(Rect::is_host).collect();
    polygons.extend(rects.iter().map(|r| (r.geometry(), "footprint")));
    for _ in 0..pg_hull {
        polygons.push((gen.hull(), "footprint"));
    }
    for _ in 0..pg_touch {
        let base = *rects.choose(&mut gen.rng).expect("rectangles");
        let w = gen.extent();
        // Share part of the base's right edge.
        let y0 = base.min_y + base.h() * gen.rng.random_range(-0.5..0.5);
        let y1 = y0 + gen.extent();
        let r = Rect {
            min_x: base.max_x,
            min_y: y0,
            max_x: base.max_x + w,
            max_y: y1.max(base.min_y + base.h() * 0.1),
        };
        polygons.push((r.geometry(), "footprint"));
    }
    for _ in 0..pg_overlap {
        let base = *rects.choose(&mut gen.rng).expect("rectangles");
        let fx = gen.rng.random_range(0.2..0.6);
        let fy = gen.rng.random_range(0.2..0.6);
        let r = Rect {
            min_x: base.min_x + base.w() * fx,
            min_y: base.min_y + base.h() * fy,
            max_x: base.max_x + base.w() * fx,
            max_y: base.max_y + base.h() * fy,
        };
        polygons.push((r.geometry(), "footprint"));
    }
    for _ in 0..pg_nested {
        let host = *hosts.choose(&mut gen.rng).expect("hosts");
        let a = host.inner_point(&mut gen.rng, 0.1);
        let c = host.inner_point(&mut gen.rng, 0.1);
        let r = Rect {
            min_x: a.x.min(c.x),
            min_y: a.y.min(c.y),
            max_x: a.x.max(c.x).max(a.x.min(c.x) + 1e-5),
            max_y: a.y.max(c.y).max(a.y.min(c.y) + 1e-5),
        };
        polygons.push((r.geometry(), "footprint"));
    }
    let dup = duplicates(&mut gen.rng, &polygons, pg_dup);
    polygons.extend(dup);

    // Linestrings.
    let [ln_dup, ln_walk, ln_inside, ln_cross_poly, ln_touch_poly, ln_cross_line, ln_touch_line, ln_overlap, ln_subpath] =
        allocate(n, [0.12, 0.30, 0.10, 0.12, 0.08, 0.10, 0.07, 0.05, 0.06]);
    let mut lines: Vec<(Geometry, &'static str)> = Vec::with_capacity(n);
    let mut walks: Vec<Vec<Coordinate>> = (0..ln_walk).map(|_| gen.random_walk()).collect();
    // A few long walks host points and sub-paths.
    for w in walks.iter_mut().step_by(4) {
        if w.len() < 10 {
            let last = w[w.len() - 1];
            let heading = gen.rng.random_range(0.0..2.0 * PI);
            let more = gen.walk_from(last, heading, 11 - w.len());
            w.extend_from_slice(&more[1..]);
        }
    }
    let line = |pts: Vec<Coordinate>| Geometry::line_string(pts).expect("finite line");
    lines.extend(walks.iter().map(|w| (line(w.clone()), "link")));
    let inside_hosts: Vec<Rect> = hosts.iter().copied().take((ln_inside / 6).max(1)).collect();
    for i in 0..ln_inside {
        let host = inside_hosts[i % inside_hosts.len()];
        let k = gen.rng.random_range(2..=4);
        let pts = (0..k)
            .map(|_| host.inner_point(&mut gen.rng, 0.1))
            .collect();
        lines.push((line(pts), "link"));
    }
    let cross_hosts: Vec<Rect> = hosts
        .iter()
        .rev()
        .copied()
        .take((ln_cross_poly / 6).max(1))
        .collect();
    for i in 0..ln_cross_poly {
        let host = cross_hosts[i % cross_hosts.len()];
        let y_in = host.min_y + host.h() * gen.rng.random_range(0.1..0.9);
        let y_out = host.min_y + host.h() * gen.rng.random_range(0.1..0.9);
        let x0 = host.min_x - gen.rng.random_range(0.0003..0.002);
        let x1 = host.max_x + gen.rng.random_range(0.0003..0.002);
        let xm = host.min_x + host.w() * gen.rng.random_range(0.3..0.7);
        let ym = host.min_y + host.h() * gen.rng.random_range(0.2..0.8);
        lines.push((
            line(vec![
                Coordinate::new(x0, y_in),
                Coordinate::new(xm, ym),
                Coordinate::new(x1, y_out),
            ]),
            "link",
        ));
    }
    for _ in 0..ln_touch_poly {
        let base = *rects.choose(&mut gen.rng).expect("rectangles");
        let corner = Coordinate::new(base.max_x, base.max_y);
        let k = gen.rng.random_range(2..=6);
        let mut pts = vec![corner];
        let mut cur = corner;
        for _ in 1..k {
            let a = gen.rng.random_range(0.15..(PI / 2.0 - 0.15));
            let s = gen.step();
            cur = Coordinate::new(cur.x + s * a.cos(), cur.y + s * a.sin());
            pts.push(cur);
        }
        lines.push((line(pts), "link"));
    }
    for _ in 0..ln_cross_line {
        let w = walks.choose(&mut gen.rng).expect("walks");
        let i = gen.rng.random_range(0..w.len() - 1);
        let (a, b) = (w[i], w[i + 1]);
        let m = Coordinate::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
        let len = ((b.x - a.x).powi(2) + (b.y - a.y).powi(2)).sqrt().max(1e-9);
        let (nx, ny) = (-(b.y - a.y) / len, (b.x - a.x) / len);
        let l0 = gen.rng.random_range(0.0002..0.001);
        let l1 = gen.rng.random_range(0.0002..0.001);
        lines.push((
            line(vec![
                Coordinate::new(m.x - nx * l0, m.y - ny * l0),
                Coordinate::new(m.x + nx * l1, m.y + ny * l1),
            ]),
            "link",
        ));
    }
    for _ in 0..ln_touch_line {
        let w = walks.choose(&mut gen.rng).expect("walks");
        let (end, prev) = (w[w.len() - 1], w[w.len() - 2]);
        let heading = (end.y - prev.y).atan2(end.x - prev.x) + gen.rng.random_range(-1.0..1.0);
        let k = gen.rng.random_range(2..=8);
        lines.push((line(gen.walk_from(end, heading, k)), "link"));
    }
    let multi: Vec<&Vec<Coordinate>> = walks.iter().filter(|w| w.len() >= 3).collect();
    for _ in 0..ln_overlap {
        let w = multi.choose(&mut gen.rng).expect("walks with 3+ vertices");
        let i = gen.rng.random_range(0..w.len() - 1);
        let (a, b) = (w[i], w[i + 1]);
        let dir = (b.y - a.y).atan2(b.x - a.x);
        let turn =
            gen.rng.random_range(0.6..1.4) * if gen.rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let s = gen.step();
        let q = Coordinate::new(b.x + s * (dir + turn).cos(), b.y + s * (dir + turn).sin());
        lines.push((line(vec![a, b, q]), "link"));
    }
    let long: Vec<&Vec<Coordinate>> = walks.iter().filter(|w| w.len() >= 8).collect();
    for i in 0..ln_subpath {
        // Several sub-paths per long walk.
        let w = long[(i / 6) % long.len()];
        let start = gen.rng.random_range(1..w.len() - 2);
        let end = gen.rng.random_range(start + 1..w.len() - 1);
        lines.push((line(w[start..=end].to_vec()), "link"));
    }
    let dup = duplicates(&mut gen.rng, &lines, ln_dup);
    lines.extend(dup);

    // Points.
    let [pt_dup, pt_uniform, pt_inside, pt_poly_vertex, pt_line_vertex, pt_line_end] =
        allocate(n, [0.12, 0.40, 0.20, 0.10, 0.12, 0.06]);
    let mut points: Vec<(Geometry, &'static str)> = Vec::with_capacity(n);
    let point = |c: Coordinate| Geometry::Point(c);
    for i in 0..pt_uniform {
        let src = if i % 2 == 0 { "intersection" } else { "poi" };
        points.push((point(gen.uniform_point()), src));
    }
    let point_hosts: Vec<Rect> = hosts
        .iter()
        .copied()
        .skip(hosts.len() / 3)
        .take((pt_inside / 8).max(1))
        .collect();
    for i in 0..pt_inside {
        let host = point_hosts[i % point_hosts.len()];
        points.push((point(host.inner_point(&mut gen.rng, 0.02)), "poi"));
    }
    for _ in 0..pt_poly_vertex {
        let r = rects.choose(&mut gen.rng).expect("rectangles");
        let c = *r.corners().choose(&mut gen.rng).expect("corners");
        points.push((point(c), "poi"));
    }
    let mut vertex_slots = long
        .iter()
        .flat_map(|w| w[1..w.len() - 1].iter().copied())
        .cycle();
    for _ in 0..pt_line_vertex {
        let c = vertex_slots
            .next()
            .expect("long walks have interior vertices");
        points.push((point(c), "intersection"));
    }
    for _ in 0..pt_line_end {
        let w = walks.choose(&mut gen.rng).expect("walks");
        let c = if gen.rng.random_bool(0.5) {
            w[0]
        } else {
            w[w.len() - 1]
        };
        points.push((point(c), "intersection"));
    }
    let dup = duplicates(&mut gen.rng, &points, pt_dup);
    points.extend(dup);

    let mut out = Vec::with_capacity(3 * n);
    for (prefix, group) in [("pt", points), ("ln", lines), ("pg", polygons)] {
        for (i, (g, src)) in group.into_iter().enumerate() {
            out.push(GeometryRecord::new(format!("{prefix}{i:05}"), g, src));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryKind;

    fn small(n: usize, seed: u64) -> BuilderConfig {
        BuilderConfig {
            samples_per_type: n,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn zero_count_is_empty() {
        assert!(generate_synthetic(&small(0, 1)).unwrap().is_empty());
    }

    #[test]
    fn same_seed_same_output() {
        let a = generate_synthetic(&small(200, 9)).unwrap();
        let b = generate_synthetic(&small(200, 9)).unwrap();
        assert_eq!(a, b);
        let c = generate_synthetic(&small(200, 10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn counts_per_type() {
        let recs = generate_synthetic(&small(150, 2)).unwrap();
        for k in GeometryKind::ALL {
            assert_eq!(recs.iter().filter(|r| r.kind() == k).count(), 150);
        }
        let mut ids: Vec<&str> = recs.iter().map(|r| r.id.as_str()).collect();
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), recs.len());
    }

    #[test]
    fn tiny_bbox_rejected() {
        let cfg = BuilderConfig {
            bbox: BBox::new(0.0, 0.0, 0.01, 0.01),
            ..small(100, 1)
        };
        assert!(matches!(
            generate_synthetic(&cfg),
            Err(DatasetError::Config(_))
        ));
    }

    #[test]
    fn hull_is_convex_ccw() {
        let pts = vec![
            Coordinate::new(0.0, 0.0),
            Coordinate::new(2.0, 0.0),
            Coordinate::new(1.0, 1.0),
            Coordinate::new(2.0, 2.0),
            Coordinate::new(0.0, 2.0),
        ];
        let h = convex_hull(pts);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&Coordinate::new(1.0, 1.0)));
    }
}
