use std::fmt::Write;

use thiserror::Error;

use super::{Coordinate, Geometry, GeometryError, LineString, Polygon, Ring};

#[derive(Debug, Error, PartialEq)]
pub enum WktError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unsupported geometry type '{0}'")]
    UnsupportedType(String),
    #[error("empty {0} is not supported")]
    EmptyGeometry(String),
}

impl From<(usize, GeometryError)> for WktError {
    fn from((pos, e): (usize, GeometryError)) -> Self {
        WktError::Syntax {
            pos,
            msg: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Number(f64),
    LParen,
    RParen,
    Comma,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    fn syntax<T>(&self, pos: usize, msg: impl Into<String>) -> Result<T, WktError> {
        Err(WktError::Syntax {
            pos,
            msg: msg.into(),
        })
    }

    /// Returns the next token and its starting byte offset.
    fn next(&mut self) -> Result<Option<(usize, Tok)>, WktError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= bytes.len() {
            return Ok(None);
        }
        let start = self.pos;
        let b = bytes[start];
        let tok = match b {
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            b if b.is_ascii_alphabetic() => {
                while self.pos < bytes.len() && bytes[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                Tok::Word(self.src[start..self.pos].to_string())
            }
            b if b.is_ascii_digit() || matches!(b, b'-' | b'+' | b'.') => {
                self.pos += 1;
                while self.pos < bytes.len() {
                    let c = bytes[self.pos];
                    let exponent_sign =
                        matches!(c, b'-' | b'+') && matches!(bytes[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || matches!(c, b'.' | b'e' | b'E') || exponent_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let text = &self.src[start..self.pos];
                match text.parse::<f64>() {
                    Ok(v) if v.is_finite() => Tok::Number(v),
                    _ => return self.syntax(start, format!("invalid number '{text}'")),
                }
            }
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or('?');
                return self.syntax(start, format!("unexpected character '{ch}'"));
            }
        };
        Ok(Some((start, tok)))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<(usize, Tok)>,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            lexer: Lexer::new(src),
            peeked: None,
        }
    }

    fn end_pos(&self) -> usize {
        self.lexer.src.len()
    }

    fn peek(&mut self) -> Result<Option<&(usize, Tok)>, WktError> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next()?;
        }
        Ok(self.peeked.as_ref())
    }

    fn bump(&mut self) -> Result<Option<(usize, Tok)>, WktError> {
        match self.peeked.take() {
            Some(t) => Ok(Some(t)),
            None => self.lexer.next(),
        }
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<usize, WktError> {
        match self.bump()? {
            Some((pos, tok)) if tok == want => Ok(pos),
            Some((pos, tok)) => Err(WktError::Syntax {
                pos,
                msg: format!("expected {what}, found {tok:?}"),
            }),
            None => Err(WktError::Syntax {
                pos: self.end_pos(),
                msg: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn number(&mut self) -> Result<f64, WktError> {
        match self.bump()? {
            Some((_, Tok::Number(v))) => Ok(v),
            Some((pos, tok)) => Err(WktError::Syntax {
                pos,
                msg: format!("expected number, found {tok:?}"),
            }),
            None => Err(WktError::Syntax {
                pos: self.end_pos(),
                msg: "expected number, found end of input".into(),
            }),
        }
    }

    fn coordinate(&mut self) -> Result<Coordinate, WktError> {
        let x = self.number()?;
        let y = self.number()?;
        if let Some((pos, Tok::Number(_))) = self.peek()? {
            return Err(WktError::Syntax {
                pos: *pos,
                msg: "coordinates must have exactly two ordinates".into(),
            });
        }
        Ok(Coordinate::new(x, y))
    }

    /// `( x y, x y, ... )`
    fn coordinate_list(&mut self) -> Result<(usize, Vec<Coordinate>), WktError> {
        let open = self.expect(Tok::LParen, "'('")?;
        let mut coords = vec![self.coordinate()?];
        loop {
            match self.bump()? {
                Some((_, Tok::Comma)) => coords.push(self.coordinate()?),
                Some((_, Tok::RParen)) => return Ok((open, coords)),
                Some((pos, tok)) => {
                    return Err(WktError::Syntax {
                        pos,
                        msg: format!("expected ',' or ')', found {tok:?}"),
                    })
                }
                None => {
                    return Err(WktError::Syntax {
                        pos: self.end_pos(),
                        msg: "unterminated coordinate list".into(),
                    })
                }
            }
        }
    }

    fn geometry(&mut self) -> Result<Geometry, WktError> {
        let (kw_pos, keyword) = match self.bump()? {
            Some((pos, Tok::Word(w))) => (pos, w),
            Some((pos, tok)) => {
                return Err(WktError::Syntax {
                    pos,
                    msg: format!("expected geometry keyword, found {tok:?}"),
                })
            }
            None => {
                return Err(WktError::Syntax {
                    pos: 0,
                    msg: "empty input".into(),
                })
            }
        };
        let upper = keyword.to_ascii_uppercase();
        match upper.as_str() {
            "POINT" | "LINESTRING" | "POLYGON" => {}
            "MULTIPOINT" | "MULTILINESTRING" | "MULTIPOLYGON" | "GEOMETRYCOLLECTION"
            | "TRIANGLE" | "TIN" | "POLYHEDRALSURFACE" | "CIRCULARSTRING" | "COMPOUNDCURVE"
            | "CURVEPOLYGON" | "MULTICURVE" | "MULTISURFACE" => {
                return Err(WktError::UnsupportedType(upper))
            }
            _ => {
                return Err(WktError::Syntax {
                    pos: kw_pos,
                    msg: format!("unknown geometry keyword '{keyword}'"),
                })
            }
        }
        if let Some((_, Tok::Word(w))) = self.peek()? {
            let w = w.to_ascii_uppercase();
            self.bump()?;
            return match w.as_str() {
                "EMPTY" => Err(WktError::EmptyGeometry(upper)),
                "Z" | "M" | "ZM" => Err(WktError::UnsupportedType(format!("{upper} {w}"))),
                _ => Err(WktError::Syntax {
                    pos: kw_pos,
                    msg: format!("unexpected word '{w}' after {upper}"),
                }),
            };
        }
        match upper.as_str() {
            "POINT" => {
                let (pos, coords) = self.coordinate_list()?;
                if coords.len() != 1 {
                    return Err(WktError::Syntax {
                        pos,
                        msg: format!("POINT takes one coordinate, got {}", coords.len()),
                    });
                }
                Ok(Geometry::Point(coords[0]))
            }
            "LINESTRING" => {
                let (pos, coords) = self.coordinate_list()?;
                LineString::new(coords)
                    .map(Geometry::LineString)
                    .map_err(|e| (pos, e).into())
            }
            _ => {
                self.expect(Tok::LParen, "'('")?;
                let mut rings = Vec::new();
                loop {
                    let (pos, coords) = self.coordinate_list()?;
                    rings.push(Ring::new(coords).map_err(|e| WktError::from((pos, e)))?);
                    match self.bump()? {
                        Some((_, Tok::Comma)) => continue,
                        Some((_, Tok::RParen)) => break,
                        Some((pos, tok)) => {
                            return Err(WktError::Syntax {
                                pos,
                                msg: format!("expected ',' or ')', found {tok:?}"),
                            })
                        }
                        None => {
                            return Err(WktError::Syntax {
                                pos: self.end_pos(),
                                msg: "unterminated polygon".into(),
                            })
                        }
                    }
                }
                let mut rings = rings.into_iter();
                let exterior = rings.next().expect("at least one ring parsed");
                Ok(Geometry::Polygon(Polygon::new(exterior, rings.collect())))
            }
        }
    }
}

/// Parses a POINT, LINESTRING or POLYGON from WKT.
///
/// Keywords are case-insensitive and whitespace between tokens is free-form.
/// Multi-geometries and `EMPTY` are rejected rather than skipped.
pub fn parse_wkt(text: &str) -> Result<Geometry, WktError> {
    let mut parser = Parser::new(text);
    let g = parser.geometry()?;
    if let Some((pos, tok)) = parser.bump()? {
        return Err(WktError::Syntax {
            pos,
            msg: format!("trailing input {tok:?}"),
        });
    }
    Ok(g)
}

/// Canonical WKT: uppercase keyword, shortest round-trip decimals, `", "`
/// between coordinates.
pub fn format_wkt(g: &Geometry) -> String {
    let mut out = String::new();
    match g {
        Geometry::Point(c) => {
            out.push_str("POINT (");
            push_coord(&mut out, c);
            out.push(')');
        }
        Geometry::LineString(l) => {
            out.push_str("LINESTRING ");
            push_coord_list(&mut out, l.coords());
        }
        Geometry::Polygon(p) => {
            out.push_str("POLYGON (");
            for (i, ring) in p.rings().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                push_coord_list(&mut out, ring.coords());
            }
            out.push(')');
        }
    }
    out
}

fn push_coord(out: &mut String, c: &Coordinate) {
    // f64 Display is the shortest decimal that parses back to the same bits.
    let _ = write!(out, "{} {}", c.x, c.y);
}

fn push_coord_list(out: &mut String, coords: &[Coordinate]) {
    out.push('(');
    for (i, c) in coords.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        push_coord(out, c);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryKind;

    #[test]
    fn parses_linestring_example() {
        let g = parse_wkt("LINESTRING (30 10, 10 30, 40 40)").unwrap();
        match &g {
            Geometry::LineString(l) => assert_eq!(
                l.coords(),
                &[
                    Coordinate::new(30.0, 10.0),
                    Coordinate::new(10.0, 30.0),
                    Coordinate::new(40.0, 40.0)
                ]
            ),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn parses_mixed_case_polygon() {
        let g = parse_wkt("Polygon ((0 0, 0 1, 1 1, 1 0, 0 0))").unwrap();
        match &g {
            Geometry::Polygon(p) => {
                assert_eq!(p.exterior().coords().len(), 5);
                assert!(p.holes().is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(format_wkt(&g), "POLYGON ((0 0, 0 1, 1 1, 1 0, 0 0))");
    }

    #[test]
    fn single_ordinate_point_is_syntax_error() {
        assert!(matches!(
            parse_wkt("POINT (30)"),
            Err(WktError::Syntax { .. })
        ));
    }

    #[test]
    fn formats_point() {
        let g = Geometry::point(30.0, 10.0).unwrap();
        assert_eq!(format_wkt(&g), "POINT (30 10)");
    }

    #[test]
    fn flexible_whitespace_and_exponents() {
        let g = parse_wkt("  point(\t-1.5e-3   2E2 )\n").unwrap();
        assert_eq!(g, Geometry::point(-0.0015, 200.0).unwrap());
    }

    #[test]
    fn polygon_with_hole() {
        let g = parse_wkt("POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 2 4, 4 4, 2 2))").unwrap();
        match &g {
            Geometry::Polygon(p) => assert_eq!(p.holes().len(), 1),
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(parse_wkt(&format_wkt(&g)).unwrap(), g);
    }

    #[test]
    fn rejects_unsupported_and_empty() {
        assert_eq!(
            parse_wkt("MULTIPOLYGON (((0 0, 1 0, 1 1, 0 0)))").unwrap_err(),
            WktError::UnsupportedType("MULTIPOLYGON".into())
        );
        assert_eq!(
            parse_wkt("POINT EMPTY").unwrap_err(),
            WktError::EmptyGeometry("POINT".into())
        );
        assert_eq!(
            parse_wkt("linestring empty").unwrap_err(),
            WktError::EmptyGeometry("LINESTRING".into())
        );
        assert!(matches!(
            parse_wkt("POINT Z (1 2 3)"),
            Err(WktError::UnsupportedType(_))
        ));
    }

    #[test]
    fn rejects_structural_errors() {
        for bad in [
            "",
            "POINT",
            "POINT (1 2",
            "POINT (1 2))",
            "POINT (1 2 3)",
            "POINT (1 2, 3 4)",
            "LINESTRING (1 2)",
            "LINESTRING (1 2,, 3 4)",
            "LINESTRING (1 2 3 4)",
            "POLYGON ((0 0, 1 0, 1 1, 0 1))",
            "POLYGON (0 0, 1 0, 1 1, 0 0)",
            "POLYGON ((0 0, 1 0, 0 0))",
            "POINT (nan 1)",
            "POINT (inf 1)",
            "POINT (1 2) POINT (3 4)",
            "PIONT (1 2)",
            "POINT (1 2) x",
            "POINT [1 2]",
        ] {
            assert!(parse_wkt(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn negative_zero_round_trips_bitwise() {
        let g = Geometry::point(-0.0, 1e-300).unwrap();
        let back = parse_wkt(&format_wkt(&g)).unwrap();
        match back {
            Geometry::Point(c) => {
                assert_eq!(c.x.to_bits(), (-0.0f64).to_bits());
                assert_eq!(c.y, 1e-300);
            }
            _ => unreachable!(),
        }
        assert_eq!(g.kind(), GeometryKind::Point);
    }
}
