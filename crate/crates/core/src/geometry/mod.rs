//! Planar and toroidal Delaunay triangulations.
//!
//! Orientation and in-circle tests are evaluated with adaptive exact
//! arithmetic, so tile sets never depend on floating-point drift. Exactly
//! co-circular Delaunay cells are triangulated by the lexicographically
//! smallest triangulation of the cell polygon, which makes every
//! triangulation a deterministic function of the point *set*.

mod mesh;
mod planar;
pub mod predicates;
mod query;
mod tiebreak;
mod torus;

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use mesh::{Mesh, MeshCavity, VertexId, INFINITE_VERTEX};
pub use planar::{delaunay, CavityDelta, Triangulation};
pub use query::{crossing_tiles, disc_leaves_rect, disc_meets_rect, tiles_covering_point};
pub use tiebreak::lexicographic_min_triangulation;
pub use torus::{
    delaunay_torus, periodic_points_in, OrbitKey, PeriodicDelta, PeriodicMesh, TorusTriangulation,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("points are collinear and admit no circumscribed disc")]
    Collinear,
    #[error("point ({0}, {1}) is already present")]
    DuplicatePoint(f64, f64),
    #[error("degenerate periodic input: {0}")]
    DegeneratePeriodicInput(String),
    #[error("point ({0}, {1}) lies outside the domain")]
    OutsideDomain(f64, f64),
    #[error("vertex is on the convex hull and cannot be removed")]
    HullVertex,
}

/// A planar point with an optional colour mark.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mark: Option<u8>,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y, mark: None }
    }

    pub const fn marked(x: f64, y: f64, mark: u8) -> Self {
        Point2 { x, y, mark: Some(mark) }
    }

    pub fn with_mark(self, mark: Option<u8>) -> Self {
        Point2 { mark, ..self }
    }

    pub fn translate(self, dx: f64, dy: f64) -> Self {
        Point2 { x: self.x + dx, y: self.y + dy, mark: self.mark }
    }

    pub fn dist(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn dist2(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Lexicographic order on coordinates (x first, then y). Marks are ignored.
    pub fn lex_cmp(&self, other: &Point2) -> Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }

    /// Bit pattern of the coordinates, used as an exact identity key.
    pub fn key(&self) -> (u64, u64) {
        // +0.0 and -0.0 are the same location.
        let nz = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
        (nz(self.x), nz(self.y))
    }

    pub(crate) fn xy(&self) -> [f64; 2] {
        [self.x, self.y]
    }
}

impl PartialEq for Point2 {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Point2 {}

impl Hash for Point2 {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// Open axis-aligned rectangle `]x0, x1[ × ]y0, y1[`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Rect { x0, y0, x1, y1 }
    }

    /// The open centred square `]-h, h[²`.
    pub fn centered_square(half_side: f64) -> Self {
        Rect::new(-half_side, -half_side, half_side, half_side)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: &Point2) -> bool {
        p.x > self.x0 && p.x < self.x1 && p.y > self.y0 && p.y < self.y1
    }

    pub fn contains_closed(&self, p: &Point2) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn on_boundary(&self, p: &Point2) -> bool {
        self.contains_closed(p) && !self.contains(p)
    }

    pub fn expand(&self, r: f64) -> Rect {
        Rect::new(self.x0 - r, self.y0 - r, self.x1 + r, self.y1 + r)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)
    }

    /// Euclidean distance from `p` to the closed rectangle.
    pub fn dist(&self, p: &Point2) -> f64 {
        let dx = (self.x0 - p.x).max(0.0).max(p.x - self.x1);
        let dy = (self.y0 - p.y).max(0.0).max(p.y - self.y1);
        dx.hypot(dy)
    }

    /// Whether `other` lies inside `self` (closures compared).
    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.x1 <= self.x1 && other.y0 >= self.y0 && other.y1 <= self.y1
    }
}

/// Circumscribed circle of three points.
pub fn circumcircle(a: Point2, b: Point2, c: Point2) -> Result<(Point2, f64), GeometryError> {
    if predicates::orient(a.xy(), b.xy(), c.xy()) == 0.0 {
        return Err(GeometryError::Collinear);
    }
    let (bx, by) = (b.x - a.x, b.y - a.y);
    let (cx, cy) = (c.x - a.x, c.y - a.y);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    let center = Point2::new(a.x + ux, a.y + uy);
    // Average the three vertex distances to damp cancellation in slivers.
    let r = (center.dist(&a) + center.dist(&b) + center.dist(&c)) / 3.0;
    Ok((center, r))
}

/// A Delaunay tile with derived geometry.
///
/// Vertices are stored in lexicographic order; identity (equality, hashing,
/// ordering) is by vertex coordinates only.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Tile {
    pub vertices: [Point2; 3],
    pub circumcenter: Point2,
    pub circumradius: f64,
    pub barycentre: Point2,
    pub area: f64,
}

impl Tile {
    pub fn new(a: Point2, b: Point2, c: Point2) -> Result<Tile, GeometryError> {
        let mut v = [a, b, c];
        v.sort_by(|p, q| p.lex_cmp(q));
        let (circumcenter, circumradius) = circumcircle(v[0], v[1], v[2])?;
        let barycentre = Point2::new(
            (v[0].x + v[1].x + v[2].x) / 3.0,
            (v[0].y + v[1].y + v[2].y) / 3.0,
        );
        let area = 0.5
            * ((v[1].x - v[0].x) * (v[2].y - v[0].y) - (v[2].x - v[0].x) * (v[1].y - v[0].y))
                .abs();
        Ok(Tile { vertices: v, circumcenter, circumradius, barycentre, area })
    }

    pub fn key(&self) -> [(u64, u64); 3] {
        [self.vertices[0].key(), self.vertices[1].key(), self.vertices[2].key()]
    }

    pub fn has_vertex(&self, p: &Point2) -> bool {
        self.vertices.iter().any(|v| v == p)
    }

    /// Whether `p` lies strictly inside the circumdisc, decided exactly.
    pub fn disc_contains(&self, p: &Point2) -> bool {
        let [a, b, c] = self.vertices;
        let o = predicates::orient(a.xy(), b.xy(), c.xy());
        let s = predicates::incircle(a.xy(), b.xy(), c.xy(), p.xy());
        if o > 0.0 {
            s > 0.0
        } else {
            s < 0.0
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Tile {
        Tile {
            vertices: self.vertices.map(|v| v.translate(dx, dy)),
            circumcenter: self.circumcenter.translate(dx, dy),
            circumradius: self.circumradius,
            barycentre: self.barycentre.translate(dx, dy),
            area: self.area,
        }
    }

    pub fn marks(&self) -> [Option<u8>; 3] {
        self.vertices.map(|v| v.mark)
    }

    pub fn edges(&self) -> [(Point2, Point2); 3] {
        let [a, b, c] = self.vertices;
        [(a, b), (b, c), (a, c)]
    }

    pub fn lex_cmp(&self, other: &Tile) -> Ordering {
        for i in 0..3 {
            let o = self.vertices[i].lex_cmp(&other.vertices[i]);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

impl PartialEq for Tile {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Tile {}

impl Hash for Tile {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key().hash(state);
    }
}

/// Sorts points lexicographically and drops exact coordinate duplicates
/// (the first occurrence wins).
pub fn dedup_points(points: &[Point2]) -> Vec<Point2> {
    let mut v = points.to_vec();
    v.sort_by(|a, b| a.lex_cmp(b));
    v.dedup_by(|a, b| a == b);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_angle_circumcircle() {
        let (c, r) =
            circumcircle(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0))
                .unwrap();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
        assert!((r - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-15);
    }

    #[test]
    fn equilateral_circumradius() {
        for s in [0.1, 1.0, 7.5] {
            let h = s * 3f64.sqrt() / 2.0;
            let (_, r) =
                circumcircle(Point2::new(0.0, 0.0), Point2::new(s, 0.0), Point2::new(s / 2.0, h))
                    .unwrap();
            assert!((r - s / 3f64.sqrt()).abs() < 1e-12 * s);
        }
    }

    #[test]
    fn collinear_is_rejected() {
        let e = circumcircle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0));
        assert_eq!(e, Err(GeometryError::Collinear));
    }

    #[test]
    fn tile_vertices_sorted_and_identity_ignores_marks() {
        let t = Tile::new(
            Point2::marked(1.0, 0.0, 1),
            Point2::new(0.0, 1.0),
            Point2::new(0.0, 0.0),
        )
        .unwrap();
        assert_eq!(t.vertices[0], Point2::new(0.0, 0.0));
        assert_eq!(t.vertices[1], Point2::new(0.0, 1.0));
        assert_eq!(t.vertices[2], Point2::new(1.0, 0.0));
        let u = Tile::new(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.0, 1.0))
            .unwrap();
        assert_eq!(t, u);
        assert!((t.area - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rect_distance() {
        let r = Rect::centered_square(1.0);
        assert_eq!(r.dist(&Point2::new(0.0, 0.0)), 0.0);
        assert!((r.dist(&Point2::new(4.0, 5.0)) - 5.0).abs() < 1e-15);
        assert!(r.on_boundary(&Point2::new(1.0, 0.3)));
    }
}
