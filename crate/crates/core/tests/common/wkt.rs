//! Random WKT geometries and structural mutations of valid WKT.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoprobe::geometry::{format_wkt, Coordinate, Geometry};

pub fn random_coord(rng: &mut ChaCha8Rng) -> (f64, f64) {
    match rng.random_range(0..4) {
        0 => (
            rng.random_range(-180.0..180.0),
            rng.random_range(-90.0..90.0),
        ),
        1 => (
            rng.random_range(-89.55..-89.25),
            rng.random_range(43.0..43.15),
        ),
        2 => (
            f64::from(rng.random_range(-1000..1000)),
            f64::from(rng.random_range(-1000..1000)) / 8.0,
        ),
        _ => (rng.random::<f64>() * 1e-7, -rng.random::<f64>() * 1e12),
    }
}

pub fn random_geometry(rng: &mut ChaCha8Rng) -> Geometry {
    match rng.random_range(0..3) {
        0 => {
            let (x, y) = random_coord(rng);
            Geometry::point(x, y).unwrap()
        }
        1 => {
            let n = rng.random_range(2..12);
            Geometry::line_string((0..n).map(|_| random_coord(rng)).collect::<Vec<_>>()).unwrap()
        }
        _ => {
            let ring = |rng: &mut ChaCha8Rng| {
                let n = rng.random_range(3..9);
                let mut cs: Vec<Coordinate> = (0..n)
                    .map(|_| Coordinate::from(random_coord(rng)))
                    .collect();
                cs.push(cs[0]);
                cs
            };
            let exterior = ring(rng);
            let holes = (0..rng.random_range(0..3)).map(|_| ring(rng)).collect();
            Geometry::polygon(exterior, holes).unwrap()
        }
    }
}

pub fn same_bits(a: &Geometry, b: &Geometry) -> bool {
    a.kind() == b.kind()
        && a.coords().count() == b.coords().count()
        && a.coords().zip(b.coords()).all(|(p, q)| p.same_bits(&q))
}

pub fn bases() -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut out: Vec<String> = [
        "POINT (30 10)",
        "LINESTRING (30 10, 10 30, 40 40)",
        "POLYGON ((30 10, 40 40, 20 40, 10 20, 30 10))",
        "POLYGON ((35 10, 45 45, 15 40, 10 20, 35 10), (20 30, 35 35, 30 20, 20 30))",
        "POINT (-89.4012 43.0731)",
        "LINESTRING (-89.4 43.07, -89.39 43.08)",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    while out.len() < 24 {
        out.push(format_wkt(&random_geometry(&mut rng)));
    }
    out
}

/// Byte range of the first number in `s`.
pub fn first_number(s: &str) -> (usize, usize) {
    let start = s.find(|c: char| c.is_ascii_digit() || c == '-').unwrap();
    let len = s[start..].find([' ', ',', ')']).unwrap();
    (start, start + len)
}

pub fn mutations(s: &str) -> Vec<String> {
    let kw_end = s.find(' ').unwrap();
    let (kw, body) = s.split_at(kw_end);
    let (ns, ne) = first_number(s);
    let replace_number = |with: &str| format!("{}{}{}", &s[..ns], with, &s[ne..]);
    let mut m = vec![
        s.replacen('(', "", 1),
        s[..s.len() - 1].to_string(),
        format!("{s})"),
        format!("{s} 1"),
        format!("{s} POINT (1 2)"),
        format!("MULTI{s}"),
        format!("{kw} Z{body}"),
        format!("{kw} M{body}"),
        format!("{kw} EMPTY"),
        format!("X{}{body}", &kw[1..]),
        format!("GEOMETRYCOLLECTION ({s})"),
        replace_number("abc"),
        replace_number("1e999"),
        replace_number("NaN"),
        replace_number("1.2.3"),
        replace_number(""),
        format!("{} 7{}", &s[..ne], &s[ne..]),
        s.replacen(')', ",)", 1),
        String::new(),
        body.to_string(),
    ];
    if s.contains(',') {
        m.push(s.replacen(',', ",,", 1));
        m.push(s.replacen(',', ";", 1));
    }
    if s.starts_with("POLYGON") {
        // break ring closure: change the last coordinate of the first ring
        let close = s.find(')').unwrap();
        let last_comma = s[..close].rfind(',').unwrap();
        m.push(format!("{}, 999 999{}", &s[..last_comma], &s[close..]));
        m.push(s.replacen("((", "(", 1));
    }
    if s.starts_with("LINESTRING") {
        let comma = s.find(',').unwrap();
        m.push(format!("{})", &s[..comma]));
    }
    if s.starts_with("POINT") {
        m.push(s.replace(')', ", 1 2)"));
    }
    m
}
