//! Delaunay triangulations of the flat torus.
//!
//! The periodic triangulation is read off the planar triangulation of the
//! 3×3 block of translated copies. Every periodic circumdisc has diameter at
//! most `√2·L`, so tiles whose centre lies in the fundamental cell are
//! entirely determined by the block.

use std::collections::HashMap;

use super::mesh::{Mesh, MeshCavity, VertexId};
use super::planar::CavityDelta;
use super::query::disc_meets_rect;
use super::{circumcircle, GeometryError, Point2, Rect, Tile};

const OFFSETS: [(i32, i32); 9] =
    [(0, 0), (-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)];

/// Lattice orbit of a periodic tile: the sorted vertex slots with offsets
/// relative to the smallest one.
pub type OrbitKey = [(u32, i32, i32); 3];

fn orbit_key(v: [(u32, i32, i32); 3]) -> OrbitKey {
    let base = *v.iter().min().unwrap();
    let mut k = v.map(|(s, a, b)| (s, a - base.1, b - base.2));
    k.sort_unstable();
    k
}

fn in_cell(c: &Point2, origin: [f64; 2], l: f64) -> bool {
    c.x >= origin[0] && c.x < origin[0] + l && c.y >= origin[1] && c.y < origin[1] + l
}

/// Tile set of the periodic continuation of a point set on `[o, o+L)²`,
/// one representative per lattice orbit with its circumcentre in the cell.
#[derive(Debug, Clone)]
pub struct TorusTriangulation {
    points: Vec<Point2>,
    origin: [f64; 2],
    period: f64,
    tiles: Vec<Tile>,
    keys: Vec<OrbitKey>,
}

/// Periodic Delaunay triangulation on `[0, L)²`.
pub fn delaunay_torus(points: &[Point2], l: f64) -> Result<TorusTriangulation, GeometryError> {
    TorusTriangulation::new(points, [0.0, 0.0], l)
}

impl TorusTriangulation {
    /// Periodic Delaunay triangulation on the cell `[o, o+L)²`.
    pub fn new(points: &[Point2], origin: [f64; 2], l: f64) -> Result<Self, GeometryError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(GeometryError::DegeneratePeriodicInput(format!("period {l}")));
        }
        if points.len() < 3 {
            return Err(GeometryError::DegeneratePeriodicInput(format!(
                "{} points, at least 3 required",
                points.len()
            )));
        }
        for p in points {
            if !p.is_finite() || !in_cell(p, origin, l) {
                return Err(GeometryError::OutsideDomain(p.x, p.y));
            }
        }
        let mut raw = Vec::with_capacity(9 * points.len());
        for p in points {
            for (a, b) in OFFSETS {
                raw.push([p.x + a as f64 * l, p.y + b as f64 * l]);
            }
        }
        let mesh = Mesh::build(&raw)?;
        let tris =
            if mesh.has_ties() { mesh.tie_broken_triangles() } else { mesh.finite_triangles().collect() };
        let eps = 1e-9 * l;
        let lo = [origin[0] - eps, origin[1] - eps];
        let span = l + 2.0 * eps;
        let mut seen: HashMap<OrbitKey, usize> = HashMap::new();
        let mut tiles = Vec::with_capacity(2 * points.len());
        let mut keys = Vec::with_capacity(2 * points.len());
        for v in tris {
            let pv = v.map(|i| raw[i as usize]);
            let (c, _) = circumcircle(
                Point2::new(pv[0][0], pv[0][1]),
                Point2::new(pv[1][0], pv[1][1]),
                Point2::new(pv[2][0], pv[2][1]),
            )?;
            if !in_cell(&c, lo, span) {
                continue;
            }
            let labelled = v.map(|i| {
                let (a, b) = OFFSETS[i as usize % 9];
                (i / 9, a, b)
            });
            let key = orbit_key(labelled);
            if seen.contains_key(&key) {
                continue;
            }
            let sx = ((c.x - origin[0]) / l).floor() as i32;
            let sy = ((c.y - origin[1]) / l).floor() as i32;
            let vs = labelled.map(|(s, a, b)| {
                let p = points[s as usize];
                Point2 {
                    x: p.x + (a - sx) as f64 * l,
                    y: p.y + (b - sy) as f64 * l,
                    mark: p.mark,
                }
            });
            let t = Tile::new(vs[0], vs[1], vs[2])?;
            seen.insert(key, tiles.len());
            tiles.push(t);
            keys.push(key);
        }
        if tiles.len() != 2 * points.len() {
            return Err(GeometryError::DegeneratePeriodicInput(format!(
                "{} tile orbits for {} points",
                tiles.len(),
                points.len()
            )));
        }
        let rmax = l / std::f64::consts::SQRT_2 * (1.0 + 1e-9);
        if let Some(t) = tiles.iter().find(|t| t.circumradius > rmax) {
            return Err(GeometryError::DegeneratePeriodicInput(format!(
                "circumradius {} exceeds L/sqrt(2)",
                t.circumradius
            )));
        }
        let mut order: Vec<usize> = (0..tiles.len()).collect();
        order.sort_by(|&i, &j| tiles[i].lex_cmp(&tiles[j]));
        let tiles = order.iter().map(|&i| tiles[i]).collect();
        let keys = order.iter().map(|&i| keys[i]).collect();
        Ok(TorusTriangulation { points: points.to_vec(), origin, period: l, tiles, keys })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    /// The fundamental cell as a rectangle.
    pub fn cell(&self) -> Rect {
        Rect::new(self.origin[0], self.origin[1], self.origin[0] + self.period, self.origin[1] + self.period)
    }

    /// Orbit representatives, sorted lexicographically.
    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn keys(&self) -> &[OrbitKey] {
        &self.keys
    }

    /// All lattice translates of tiles whose circumdisc meets `r`.
    pub fn periodic_tiles_meeting(&self, r: &Rect) -> Vec<Tile> {
        let l = self.period;
        let mut out = Vec::new();
        for t in &self.tiles {
            let (c, rho) = (t.circumcenter, t.circumradius);
            let i0 = ((r.x0 - c.x - rho) / l).floor() as i64;
            let i1 = ((r.x1 - c.x + rho) / l).ceil() as i64;
            let j0 = ((r.y0 - c.y - rho) / l).floor() as i64;
            let j1 = ((r.y1 - c.y + rho) / l).ceil() as i64;
            for i in i0..=i1 {
                for j in j0..=j1 {
                    let cc = c.translate(i as f64 * l, j as f64 * l);
                    if disc_meets_rect(&cc, rho, r) {
                        out.push(t.translate(i as f64 * l, j as f64 * l));
                    }
                }
            }
        }
        out
    }

    /// Points of the periodic continuation lying in the open rectangle `r`.
    pub fn periodic_points_in(&self, r: &Rect) -> Vec<Point2> {
        periodic_points_in(&self.points, self.period, r)
    }

    /// Inserts `x` by recomputation and reports the orbit-level difference.
    pub fn insert_cavity(&mut self, x: Point2) -> Result<CavityDelta, GeometryError> {
        if self.points.iter().any(|p| *p == x) {
            return Err(GeometryError::DuplicatePoint(x.x, x.y));
        }
        let mut pts = self.points.clone();
        pts.push(x);
        let next = TorusTriangulation::new(&pts, self.origin, self.period)?;
        let old: HashMap<OrbitKey, Tile> = self.keys.iter().copied().zip(self.tiles.iter().copied()).collect();
        let new: HashMap<OrbitKey, Tile> = next.keys.iter().copied().zip(next.tiles.iter().copied()).collect();
        let mut destroyed: Vec<Tile> =
            old.iter().filter(|(k, _)| !new.contains_key(*k)).map(|(_, t)| *t).collect();
        let mut created: Vec<Tile> =
            new.iter().filter(|(k, _)| !old.contains_key(*k)).map(|(_, t)| *t).collect();
        destroyed.sort_by(|a, b| a.lex_cmp(b));
        created.sort_by(|a, b| a.lex_cmp(b));
        *self = next;
        Ok(CavityDelta { point: x, destroyed, created })
    }
}

/// Points of the periodic continuation of `points` (period `l`) inside the
/// open rectangle `r`.
pub fn periodic_points_in(points: &[Point2], l: f64, r: &Rect) -> Vec<Point2> {
    let mut out = Vec::new();
    for p in points {
        let i0 = ((r.x0 - p.x) / l).floor() as i64;
        let i1 = ((r.x1 - p.x) / l).ceil() as i64;
        let j0 = ((r.y0 - p.y) / l).floor() as i64;
        let j1 = ((r.y1 - p.y) / l).ceil() as i64;
        for i in i0..=i1 {
            for j in j0..=j1 {
                let q = p.translate(i as f64 * l, j as f64 * l);
                if r.contains(&q) {
                    out.push(q);
                }
            }
        }
    }
    out
}

/// Orbit-level change of the periodic tile set.
#[derive(Debug, Clone, Default)]
pub struct PeriodicDelta {
    pub destroyed: Vec<Tile>,
    pub created: Vec<Tile>,
    /// Periodic distance from the inserted point to its nearest neighbour
    /// (infinite for removals or an empty configuration).
    pub nearest: f64,
}

/// Incrementally maintained periodic triangulation for Markov chains.
///
/// The plane mesh holds the nine copies of every point plus a far-away
/// frame triangle, so every copy is an interior vertex and can be removed.
/// Co-circular ties are not broken here; they have probability zero under
/// continuous proposals.
#[derive(Debug, Clone)]
pub struct PeriodicMesh {
    origin: [f64; 2],
    period: f64,
    mesh: Mesh,
    points: Vec<Point2>,
    copies: Vec<[VertexId; 9]>,
    owner: Vec<Option<(u32, u8)>>,
}

impl PeriodicMesh {
    pub fn new(points: &[Point2], origin: [f64; 2], l: f64) -> Result<Self, GeometryError> {
        let m = [origin[0] + 0.5 * l, origin[1] + 0.5 * l];
        let rf = 60.0 * l;
        let mut raw: Vec<[f64; 2]> = (0..3)
            .map(|k| {
                let t = std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::TAU / 3.0;
                [m[0] + rf * t.cos(), m[1] + rf * t.sin()]
            })
            .collect();
        let mut owner: Vec<Option<(u32, u8)>> = vec![None; 3];
        let mut copies = Vec::with_capacity(points.len());
        for (s, p) in points.iter().enumerate() {
            if !p.is_finite() || !in_cell(p, origin, l) {
                return Err(GeometryError::OutsideDomain(p.x, p.y));
            }
            let mut ids = [0; 9];
            for (k, (a, b)) in OFFSETS.iter().enumerate() {
                ids[k] = raw.len() as VertexId;
                raw.push([p.x + *a as f64 * l, p.y + *b as f64 * l]);
                owner.push(Some((s as u32, k as u8)));
            }
            copies.push(ids);
        }
        let mut mesh = Mesh::build(&raw)?;
        let spacing = if points.is_empty() { l } else { l / (points.len() as f64).sqrt() };
        mesh.set_hint_cell(spacing);
        Ok(PeriodicMesh { origin, period: l, mesh, points: points.to_vec(), copies, owner })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn origin(&self) -> [f64; 2] {
        self.origin
    }

    fn set_owner(&mut self, v: VertexId, o: Option<(u32, u8)>) {
        let i = v as usize;
        if i >= self.owner.len() {
            self.owner.resize(i + 1, None);
        }
        self.owner[i] = o;
    }

    fn label(&self, v: VertexId) -> Option<(u32, i32, i32)> {
        self.owner[v as usize].map(|(s, k)| {
            let (a, b) = OFFSETS[k as usize];
            (s, a, b)
        })
    }

    fn tile_of(&self, v: [VertexId; 3]) -> Tile {
        let vs = v.map(|i| {
            let p = self.mesh.point(i);
            let mark = self.owner[i as usize].and_then(|(s, _)| self.points[s as usize].mark);
            Point2 { x: p[0], y: p[1], mark }
        });
        Tile::new(vs[0], vs[1], vs[2]).expect("mesh triangle")
    }

    /// Cell-centred, frame-free triangles of a cavity, with their orbit key.
    fn tally(&self, cav: &MeshCavity, net: &mut HashMap<OrbitKey, (i32, Tile)>) {
        for (list, sign) in [(&cav.destroyed, -1), (&cav.created, 1)] {
            for &v in list.iter() {
                let labels = [self.label(v[0]), self.label(v[1]), self.label(v[2])];
                let (Some(a), Some(b), Some(c)) = (labels[0], labels[1], labels[2]) else {
                    continue;
                };
                let t = self.tile_of(v);
                if !in_cell(&t.circumcenter, self.origin, self.period) {
                    continue;
                }
                let e = net.entry(orbit_key([a, b, c])).or_insert((0, t));
                e.0 += sign;
            }
        }
    }

    fn finish(net: HashMap<OrbitKey, (i32, Tile)>, nearest: f64) -> PeriodicDelta {
        let mut d = PeriodicDelta { nearest, ..Default::default() };
        let mut items: Vec<(OrbitKey, (i32, Tile))> = net.into_iter().collect();
        items.sort_by(|a, b| a.0.cmp(&b.0));
        for (_, (n, t)) in items {
            match n.signum() {
                1 => d.created.push(t),
                -1 => d.destroyed.push(t),
                _ => {}
            }
        }
        d
    }

    /// Adds a point of the cell. Its slot is `len() - 1` afterwards.
    pub fn insert(&mut self, p: Point2) -> Result<PeriodicDelta, GeometryError> {
        let l = self.period;
        if !p.is_finite() || !in_cell(&p, self.origin, l) {
            return Err(GeometryError::OutsideDomain(p.x, p.y));
        }
        for (a, b) in OFFSETS {
            if self.mesh.vertex_at([p.x + a as f64 * l, p.y + b as f64 * l]).is_some() {
                return Err(GeometryError::DuplicatePoint(p.x, p.y));
            }
        }
        let slot = self.points.len() as u32;
        self.points.push(p);
        let mut net = HashMap::new();
        let mut ids = [0; 9];
        for (k, (a, b)) in OFFSETS.iter().enumerate() {
            let cav = self.mesh.insert([p.x + *a as f64 * l, p.y + *b as f64 * l])?;
            ids[k] = cav.vertex;
            self.set_owner(cav.vertex, Some((slot, k as u8)));
            self.tally(&cav, &mut net);
        }
        self.copies.push(ids);
        let centre = self.mesh.point(ids[0]);
        let nearest = self
            .mesh
            .incident_triangles(ids[0])
            .iter()
            .flatten()
            .filter(|&&v| v != ids[0] && self.owner[v as usize].is_some())
            .map(|&v| {
                let q = self.mesh.point(v);
                (q[0] - centre[0]).hypot(q[1] - centre[1])
            })
            .fold(f64::INFINITY, f64::min);
        Ok(Self::finish(net, nearest))
    }

    /// Removes the point in `slot`; the last point takes its slot.
    pub fn remove(&mut self, slot: usize) -> Result<PeriodicDelta, GeometryError> {
        let mut net = HashMap::new();
        let ids = self.copies[slot];
        for v in ids {
            let cav = self.mesh.remove(v)?;
            self.tally(&cav, &mut net);
            self.set_owner(v, None);
        }
        let last = self.points.len() - 1;
        self.points.swap_remove(slot);
        self.copies.swap_remove(slot);
        if slot != last {
            for (k, &v) in self.copies[slot].clone().iter().enumerate() {
                self.set_owner(v, Some((slot as u32, k as u8)));
            }
        }
        Ok(Self::finish(net, f64::INFINITY))
    }

    /// Orbit representatives read from the mesh (cell-centred triangles).
    /// Meaningful for at least three points.
    pub fn tiles(&self) -> Vec<Tile> {
        let mut seen = HashMap::new();
        for v in self.mesh.finite_triangles() {
            let labels = [self.label(v[0]), self.label(v[1]), self.label(v[2])];
            let (Some(a), Some(b), Some(c)) = (labels[0], labels[1], labels[2]) else {
                continue;
            };
            let t = self.tile_of(v);
            if in_cell(&t.circumcenter, self.origin, self.period) {
                seen.entry(orbit_key([a, b, c])).or_insert(t);
            }
        }
        let mut out: Vec<Tile> = seen.into_values().collect();
        out.sort_by(|a, b| a.lex_cmp(b));
        out
    }

    /// Periodic distance from `p` to its nearest point, by brute force over
    /// the point set's minimal images.
    pub fn nearest_distance(&self, p: &Point2, skip: Option<usize>) -> f64 {
        let l = self.period;
        let mut best = f64::INFINITY;
        for (i, q) in self.points.iter().enumerate() {
            if Some(i) == skip {
                continue;
            }
            let mut dx = (q.x - p.x).abs() % l;
            let mut dy = (q.y - p.y).abs() % l;
            dx = dx.min(l - dx);
            dy = dy.min(l - dy);
            best = best.min(dx.hypot(dy));
        }
        best
    }

    pub fn set_mark(&mut self, slot: usize, mark: Option<u8>) {
        self.points[slot].mark = mark;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, l: f64, seed: u64) -> Vec<Point2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| Point2::new(rng.gen::<f64>() * l, rng.gen::<f64>() * l)).collect()
    }

    #[test]
    fn two_tiles_per_point() {
        for (n, seed) in [(3, 1), (4, 2), (10, 3), (200, 4)] {
            let t = delaunay_torus(&random(n, 3.0, seed), 3.0).unwrap();
            assert_eq!(t.tiles().len(), 2 * n);
            for tile in t.tiles() {
                assert!(in_cell(&tile.circumcenter, [0.0, 0.0], 3.0 + 1e-9));
            }
        }
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(
            delaunay_torus(&[Point2::new(0.5, 0.5)], 1.0),
            Err(GeometryError::DegeneratePeriodicInput(_))
        ));
    }

    #[test]
    fn grid_with_ties() {
        let k = 4;
        let pts: Vec<Point2> =
            (0..k * k).map(|i| Point2::new((i % k) as f64, (i / k) as f64)).collect();
        let t = delaunay_torus(&pts, k as f64).unwrap();
        assert_eq!(t.tiles().len(), 2 * k * k);
        let mut rev = pts.clone();
        rev.reverse();
        let u = delaunay_torus(&rev, k as f64).unwrap();
        let mut a: Vec<_> = t.tiles().iter().map(|t| t.key()).collect();
        let mut b: Vec<_> = u.tiles().iter().map(|t| t.key()).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn incremental_periodic_mesh_matches_scratch() {
        let l = 5.0;
        let pts = random(40, l, 9);
        let mut pm = PeriodicMesh::new(&pts, [0.0, 0.0], l).unwrap();
        let energy = |ts: &[Tile]| ts.iter().map(|t| t.circumradius).sum::<f64>();
        let mut h = energy(delaunay_torus(pm.points(), l).unwrap().tiles());
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for step in 0..80 {
            let d = if step % 3 == 2 {
                pm.remove(rng.gen_range(0..pm.len())).unwrap()
            } else {
                pm.insert(Point2::new(rng.gen::<f64>() * l, rng.gen::<f64>() * l)).unwrap()
            };
            h += energy(&d.created) - energy(&d.destroyed);
            let scratch = delaunay_torus(pm.points(), l).unwrap();
            assert!((h - energy(scratch.tiles())).abs() < 1e-9, "step {step}");
            assert_eq!(pm.tiles().len(), 2 * pm.len());
        }
    }

    #[test]
    fn shifted_cell() {
        let o = [-2.5, -2.5];
        let pts: Vec<Point2> = random(30, 5.0, 3).iter().map(|p| p.translate(o[0], o[1])).collect();
        let t = TorusTriangulation::new(&pts, o, 5.0).unwrap();
        assert_eq!(t.tiles().len(), 60);
        let view = t.periodic_tiles_meeting(&t.cell());
        assert!(view.len() >= 60);
    }
}
