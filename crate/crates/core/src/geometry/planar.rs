use std::collections::HashMap;

use super::mesh::{Mesh, VertexId};
use super::{dedup_points, GeometryError, Point2, Rect, Tile};

type TileKey = [(u64, u64); 3];

/// Tiles removed and added by a single point insertion.
#[derive(Debug, Clone, Default)]
pub struct CavityDelta {
    pub point: Point2,
    pub destroyed: Vec<Tile>,
    pub created: Vec<Tile>,
}

impl CavityDelta {
    /// Whether `p` lies in the closed union of the destroyed tiles.
    pub fn region_contains(&self, p: &Point2) -> bool {
        self.destroyed.iter().any(|t| triangle_contains_closed(t, p))
    }
}

fn triangle_contains_closed(t: &Tile, p: &Point2) -> bool {
    use super::predicates::orient;
    let [a, b, c] = t.vertices.map(|v| v.xy());
    let q = p.xy();
    let (o1, o2, o3) = (orient(a, b, q), orient(b, c, q), orient(c, a, q));
    (o1 >= 0.0 && o2 >= 0.0 && o3 >= 0.0) || (o1 <= 0.0 && o2 <= 0.0 && o3 <= 0.0)
}

/// Delaunay triangulation of a finite planar point set.
///
/// The optional window is carried along for the tile-selection rules used by
/// the energy functionals; the triangulation itself always covers the convex
/// hull.
#[derive(Debug, Clone)]
pub struct Triangulation {
    points: Vec<Point2>,
    window: Option<Rect>,
    mesh: Mesh,
    tiles: HashMap<TileKey, Tile>,
    ties: bool,
}

/// Builds the Delaunay triangulation of `points`. Exact duplicates are
/// merged; fewer than three points or an all-collinear set give no tiles.
pub fn delaunay(points: &[Point2], window: Option<Rect>) -> Triangulation {
    let pts = dedup_points(points);
    let raw: Vec<[f64; 2]> = pts.iter().map(|p| p.xy()).collect();
    let mesh = Mesh::build(&raw).expect("deduplicated finite points");
    let mut t = Triangulation { points: pts, window, mesh, tiles: HashMap::new(), ties: false };
    t.rebuild_tiles();
    t
}

impl Triangulation {
    fn tile_of(&self, v: [VertexId; 3]) -> Tile {
        let [a, b, c] = v.map(|i| self.points[i as usize]);
        Tile::new(a, b, c).expect("mesh triangles are non-degenerate")
    }

    fn rebuild_tiles(&mut self) {
        self.ties = self.mesh.has_ties();
        let tris = if self.ties {
            self.mesh.tie_broken_triangles()
        } else {
            self.mesh.finite_triangles().collect()
        };
        self.tiles = tris
            .into_iter()
            .map(|v| {
                let t = self.tile_of(v);
                (t.key(), t)
            })
            .collect();
    }

    /// Live points (exact duplicates removed).
    pub fn points(&self) -> Vec<Point2> {
        (0..self.points.len())
            .filter(|&i| self.mesh.is_alive(i as VertexId))
            .map(|i| self.points[i])
            .collect()
    }

    pub fn len(&self) -> usize {
        self.mesh.vertex_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn window(&self) -> Option<Rect> {
        self.window
    }

    /// Tiles sorted lexicographically.
    pub fn tiles(&self) -> Vec<Tile> {
        let mut v: Vec<Tile> = self.tiles.values().copied().collect();
        v.sort_by(|a, b| a.lex_cmp(b));
        v
    }

    pub fn tile_count(&self) -> usize {
        self.tiles.len()
    }

    pub fn iter_tiles(&self) -> impl Iterator<Item = &Tile> {
        self.tiles.values()
    }

    pub fn contains_tile(&self, t: &Tile) -> bool {
        self.tiles.contains_key(&t.key())
    }

    /// Number of vertices on the convex hull boundary, including vertices in
    /// the relative interior of hull edges.
    pub fn hull_vertex_count(&self) -> usize {
        if self.tiles.is_empty() {
            return 0;
        }
        self.mesh.hull_vertices().len()
    }

    /// Inserts `x` and reports the destroyed and created tiles.
    pub fn insert_cavity(&mut self, x: Point2) -> Result<CavityDelta, GeometryError> {
        if !x.is_finite() {
            return Err(GeometryError::OutsideDomain(x.x, x.y));
        }
        if let Some(w) = self.window {
            if !w.contains_closed(&x) {
                return Err(GeometryError::OutsideDomain(x.x, x.y));
            }
        }
        let cav = self.mesh.insert(x.xy())?;
        self.points.push(x);
        debug_assert_eq!(self.points.len() - 1, cav.vertex as usize);
        if !self.ties && !self.tiles.is_empty() && !self.mesh.ties_around(cav.vertex) {
            let destroyed: Vec<Tile> = cav.destroyed.iter().map(|&v| self.tile_of(v)).collect();
            let created: Vec<Tile> = cav.created.iter().map(|&v| self.tile_of(v)).collect();
            for t in &destroyed {
                self.tiles.remove(&t.key());
            }
            for t in &created {
                self.tiles.insert(t.key(), *t);
            }
            return Ok(CavityDelta { point: x, destroyed, created });
        }
        let old = std::mem::take(&mut self.tiles);
        self.rebuild_tiles();
        let destroyed = old.iter().filter(|(k, _)| !self.tiles.contains_key(*k)).map(|(_, t)| *t).collect();
        let created =
            self.tiles.iter().filter(|(k, _)| !old.contains_key(*k)).map(|(_, t)| *t).collect();
        Ok(CavityDelta { point: x, destroyed, created })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn three_points_one_tile() {
        let t = delaunay(
            &[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.2, 0.7)],
            None,
        );
        assert_eq!(t.tile_count(), 1);
    }

    #[test]
    fn degenerate_inputs_are_empty() {
        assert_eq!(delaunay(&[], None).tile_count(), 0);
        let line: Vec<Point2> = (0..4).map(|i| Point2::new(i as f64, 0.0)).collect();
        assert_eq!(delaunay(&line, None).tile_count(), 0);
    }

    #[test]
    fn unit_square_tie_is_permutation_stable() {
        let c = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        let expect = delaunay(&c, None).tiles();
        assert_eq!(expect.len(), 2);
        assert_eq!(expect[0].vertices, [c[0], c[3], c[1]]);
        for perm in [[3, 2, 1, 0], [1, 3, 0, 2], [2, 0, 3, 1]] {
            let p: Vec<Point2> = perm.iter().map(|&i| c[i]).collect();
            assert_eq!(delaunay(&p, None).tiles(), expect);
        }
    }

    #[test]
    fn incremental_matches_scratch() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts: Vec<Point2> =
            (0..60).map(|_| Point2::new(rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let mut t = delaunay(&pts, None);
        for _ in 0..60 {
            let x = Point2::new(rng.gen::<f64>() * 1.4 - 0.2, rng.gen::<f64>() * 1.4 - 0.2);
            let before = t.tile_count();
            let d = t.insert_cavity(x).unwrap();
            assert_eq!(t.tile_count() + d.destroyed.len(), before + d.created.len());
            pts.push(x);
            assert_eq!(t.tiles(), delaunay(&pts, None).tiles());
        }
    }

    #[test]
    fn incremental_on_grid_with_ties() {
        let mut pts = Vec::new();
        let mut t = delaunay(&pts, None);
        for i in 0..5 {
            for j in 0..5 {
                let p = Point2::new(i as f64, j as f64);
                t.insert_cavity(p).unwrap();
                pts.push(p);
                assert_eq!(t.tiles(), delaunay(&pts, None).tiles());
            }
        }
        assert_eq!(t.tile_count(), 32);
    }

    #[test]
    fn duplicate_insert_rejected() {
        let mut t = delaunay(
            &[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(0.2, 0.7)],
            None,
        );
        assert!(matches!(
            t.insert_cavity(Point2::new(1.0, 0.0)),
            Err(GeometryError::DuplicatePoint(..))
        ));
    }
}
