//! Plain-text point-set snapshots.
//!
//! ```text
//! # optional comments
//! torus 5
//! 0.25 1.5
//! 3.0 2.0 2
//! ```
//!
//! The header is `torus L` or `window x0 y0 x1 y1`; each further line holds
//! `x y` or `x y mark`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::{Point2, Rect};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Torus(f64),
    Window(Rect),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub domain: Domain,
    pub points: Vec<Point2>,
}

#[derive(Debug, Error, PartialEq)]
pub enum SnapshotError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing header")]
    MissingHeader,
}

fn parse_f64(tok: &str, line: usize) -> Result<f64, SnapshotError> {
    let v: f64 = tok.parse().map_err(|_| SnapshotError::Parse { line, msg: format!("bad number {tok:?}") })?;
    if !v.is_finite() {
        return Err(SnapshotError::Parse { line, msg: format!("non-finite number {tok:?}") });
    }
    Ok(v)
}

impl Snapshot {
    pub fn parse(text: &str) -> Result<Snapshot, SnapshotError> {
        let mut domain = None;
        let mut points = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let toks: Vec<&str> = body.split_whitespace().collect();
            if domain.is_none() {
                domain = Some(match toks.as_slice() {
                    ["torus", l] => {
                        let l = parse_f64(l, line)?;
                        if l <= 0.0 {
                            return Err(SnapshotError::Parse { line, msg: "period must be positive".into() });
                        }
                        Domain::Torus(l)
                    }
                    ["window", a, b, c, d] => {
                        let (x0, y0) = (parse_f64(a, line)?, parse_f64(b, line)?);
                        let (x1, y1) = (parse_f64(c, line)?, parse_f64(d, line)?);
                        if !(x0 < x1 && y0 < y1) {
                            return Err(SnapshotError::Parse { line, msg: "empty window".into() });
                        }
                        Domain::Window(Rect::new(x0, y0, x1, y1))
                    }
                    _ => return Err(SnapshotError::MissingHeader),
                });
                continue;
            }
            let p = match toks.as_slice() {
                [x, y] => Point2::new(parse_f64(x, line)?, parse_f64(y, line)?),
                [x, y, m] => {
                    let m: u8 = m.parse().map_err(|_| SnapshotError::Parse { line, msg: format!("bad mark {m:?}") })?;
                    Point2::marked(parse_f64(x, line)?, parse_f64(y, line)?, m)
                }
                _ => return Err(SnapshotError::Parse { line, msg: "expected `x y` or `x y mark`".into() }),
            };
            points.push(p);
        }
        Ok(Snapshot { domain: domain.ok_or(SnapshotError::MissingHeader)?, points })
    }

    /// Shortest round-trip decimal representation of every coordinate.
    pub fn render(&self, comment: Option<&str>) -> String {
        let mut s = String::new();
        if let Some(c) = comment {
            for l in c.lines() {
                let _ = writeln!(s, "# {l}");
            }
        }
        match self.domain {
            Domain::Torus(l) => {
                let _ = writeln!(s, "torus {l:?}");
            }
            Domain::Window(r) => {
                let _ = writeln!(s, "window {:?} {:?} {:?} {:?}", r.x0, r.y0, r.x1, r.y1);
            }
        }
        for p in &self.points {
            match p.mark {
                Some(m) => writeln!(s, "{:?} {:?} {m}", p.x, p.y),
                None => writeln!(s, "{:?} {:?}", p.x, p.y),
            }
            .expect("writing to a string");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let s = Snapshot {
            domain: Domain::Window(Rect::new(-1.5, -1.5, 1.5, 1.5)),
            points: vec![Point2::new(0.1, -0.3), Point2::marked(1.0 / 3.0, 0.0, 2)],
        };
        let text = s.render(Some("test"));
        assert_eq!(Snapshot::parse(&text).unwrap(), s);
        let t = Snapshot::parse("# c\ntorus 5\n1 2 # trailing\n\n3 4 1\n").unwrap();
        assert_eq!(t.domain, Domain::Torus(5.0));
        assert_eq!(t.points.len(), 2);
        assert_eq!(t.points[1].mark, Some(1));
    }

    #[test]
    fn rejects_garbage() {
        assert_eq!(Snapshot::parse("1 2\n"), Err(SnapshotError::MissingHeader));
        assert!(Snapshot::parse("torus 3\n1 2 3 4\n").is_err());
        assert!(Snapshot::parse("torus 3\n1 nan\n").is_err());
        assert!(Snapshot::parse("window 0 0 0 1\n").is_err());
    }
}
