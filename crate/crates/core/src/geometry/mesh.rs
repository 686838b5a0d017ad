//! Incremental Delaunay mesh with an infinite vertex.
//!
//! The mesh stores finite triangles together with "ghost" triangles that
//! join each convex-hull edge to [`INFINITE_VERTEX`], so that insertion
//! outside the hull is the same cavity operation as insertion inside.
//! Triangles are counterclockwise; `n[i]` is the neighbour across the edge
//! opposite `v[i]`.

use std::collections::HashMap;

use super::predicates::{incircle, orient, strictly_between};
use super::tiebreak::lexicographic_min_triangulation;
use super::GeometryError;

pub type VertexId = u32;
pub const INFINITE_VERTEX: VertexId = u32::MAX;

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX - 1;

#[derive(Debug, Clone, Copy)]
struct Tri {
    v: [u32; 3],
    n: [u32; 3],
}

impl Tri {
    fn is_dead(&self) -> bool {
        self.v[0] == DEAD
    }

    fn is_ghost(&self) -> bool {
        self.v.contains(&INFINITE_VERTEX)
    }

    fn index_of(&self, vertex: u32) -> Option<usize> {
        self.v.iter().position(|&x| x == vertex)
    }
}

/// The triangles destroyed and created by one insertion or removal.
///
/// Only finite triangles are reported, as counterclockwise vertex triples.
#[derive(Debug, Clone, Default)]
pub struct MeshCavity {
    pub vertex: VertexId,
    pub destroyed: Vec<[VertexId; 3]>,
    pub created: Vec<[VertexId; 3]>,
    /// Coordinates of the vertex, kept because a removed vertex is gone from
    /// the mesh by the time the caller inspects `destroyed`.
    pub location: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct Mesh {
    pts: Vec<[f64; 2]>,
    alive: Vec<bool>,
    vtri: Vec<u32>,
    tris: Vec<Tri>,
    free: Vec<u32>,
    free_vertices: Vec<u32>,
    last: u32,
    mark: Vec<(u32, bool)>,
    stamp: u32,
    index: HashMap<(u64, u64), VertexId>,
    hint_cell: Option<f64>,
    hints: HashMap<(i64, i64), VertexId>,
    n_alive: usize,
    walk_rot: u32,
}

fn key(p: [f64; 2]) -> (u64, u64) {
    let nz = |v: f64| if v == 0.0 { 0u64 } else { v.to_bits() };
    (nz(p[0]), nz(p[1]))
}

impl Default for Mesh {
    fn default() -> Self {
        Self::empty()
    }
}

impl Mesh {
    pub fn empty() -> Mesh {
        Mesh {
            pts: Vec::new(),
            alive: Vec::new(),
            vtri: Vec::new(),
            tris: Vec::new(),
            free: Vec::new(),
            free_vertices: Vec::new(),
            last: NONE,
            mark: Vec::new(),
            stamp: 0,
            index: HashMap::new(),
            hint_cell: None,
            hints: HashMap::new(),
            n_alive: 0,
            walk_rot: 0,
        }
    }

    /// Builds the Delaunay mesh of distinct points. Vertex `i` is `points[i]`.
    pub fn build(points: &[[f64; 2]]) -> Result<Mesh, GeometryError> {
        let mut mesh = Mesh::empty();
        for &p in points {
            mesh.push_vertex(p)?;
        }
        mesh.initialise();
        Ok(mesh)
    }

    /// Enables the bucket hint used to start point location for scattered
    /// insertions. `cell` should be comparable to the typical point spacing.
    pub fn set_hint_cell(&mut self, cell: f64) {
        self.hint_cell = Some(cell);
        self.hints.clear();
        for v in 0..self.pts.len() {
            if self.alive[v] {
                self.record_hint(v as u32);
            }
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n_alive
    }

    pub fn point(&self, v: VertexId) -> [f64; 2] {
        self.pts[v as usize]
    }

    pub fn is_alive(&self, v: VertexId) -> bool {
        (v as usize) < self.alive.len() && self.alive[v as usize]
    }

    pub fn vertex_at(&self, p: [f64; 2]) -> Option<VertexId> {
        self.index.get(&key(p)).copied()
    }

    /// Whether the mesh has at least one triangle (the points are not all
    /// collinear).
    pub fn is_triangulated(&self) -> bool {
        self.last != NONE
    }

    pub fn finite_triangles(&self) -> impl Iterator<Item = [VertexId; 3]> + '_ {
        self.tris.iter().filter(|t| !t.is_dead() && !t.is_ghost()).map(|t| t.v)
    }

    /// Vertices on the convex hull, in no particular order.
    pub fn hull_vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .tris
            .iter()
            .filter(|t| !t.is_dead() && t.is_ghost())
            .flat_map(|t| t.v)
            .filter(|&v| v != INFINITE_VERTEX)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Finite triangles incident to `v`.
    pub fn incident_triangles(&self, v: VertexId) -> Vec<[VertexId; 3]> {
        if !self.is_alive(v) || !self.is_triangulated() {
            return Vec::new();
        }
        let start = self.vtri[v as usize];
        let mut out = Vec::new();
        let mut t = start;
        for _ in 0..self.tris.len() + 1 {
            let tri = self.tris[t as usize];
            if !tri.is_ghost() {
                out.push(tri.v);
            }
            let i = tri.index_of(v).expect("vertex incident triangle");
            t = tri.n[(i + 1) % 3];
            if t == start {
                break;
            }
        }
        out
    }

    fn push_vertex(&mut self, p: [f64; 2]) -> Result<VertexId, GeometryError> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(GeometryError::OutsideDomain(p[0], p[1]));
        }
        let k = key(p);
        if self.index.contains_key(&k) {
            return Err(GeometryError::DuplicatePoint(p[0], p[1]));
        }
        let id = if let Some(id) = self.free_vertices.pop() {
            self.pts[id as usize] = p;
            self.alive[id as usize] = true;
            self.vtri[id as usize] = NONE;
            id
        } else {
            self.pts.push(p);
            self.alive.push(true);
            self.vtri.push(NONE);
            (self.pts.len() - 1) as VertexId
        };
        self.index.insert(k, id);
        self.n_alive += 1;
        Ok(id)
    }

    fn alloc(&mut self, t: Tri) -> u32 {
        if let Some(id) = self.free.pop() {
            self.tris[id as usize] = t;
            self.mark[id as usize] = (0, false);
            id
        } else {
            self.tris.push(t);
            self.mark.push((0, false));
            (self.tris.len() - 1) as u32
        }
    }

    fn kill(&mut self, t: u32) {
        self.tris[t as usize].v[0] = DEAD;
        self.free.push(t);
    }

    /// Builds triangles from scratch over all alive vertices, if three of
    /// them are not collinear.
    fn initialise(&mut self) {
        self.tris.clear();
        self.free.clear();
        self.mark.clear();
        self.last = NONE;
        let mut order: Vec<u32> =
            (0..self.pts.len() as u32).filter(|&v| self.alive[v as usize]).collect();
        if order.len() < 3 {
            return;
        }
        hilbert_sort(&self.pts, &mut order);
        let a = order[0];
        let b = order[1];
        let Some(ci) = (2..order.len())
            .find(|&i| orient(self.pts[a as usize], self.pts[b as usize], self.pts[order[i] as usize]) != 0.0)
        else {
            return;
        };
        let c = order[ci];
        let (a, b) = if orient(self.pts[a as usize], self.pts[b as usize], self.pts[c as usize]) > 0.0 {
            (a, b)
        } else {
            (b, a)
        };
        let t0 = self.alloc(Tri { v: [a, b, c], n: [NONE; 3] });
        let gab = self.alloc(Tri { v: [b, a, INFINITE_VERTEX], n: [NONE; 3] });
        let gbc = self.alloc(Tri { v: [c, b, INFINITE_VERTEX], n: [NONE; 3] });
        let gca = self.alloc(Tri { v: [a, c, INFINITE_VERTEX], n: [NONE; 3] });
        self.link_by_edges(&[t0, gab, gbc, gca]);
        for v in [a, b, c] {
            self.vtri[v as usize] = t0;
        }
        self.last = t0;
        let rest: Vec<u32> = order
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != 0 && i != 1 && i != ci)
            .map(|(_, &v)| v)
            .collect();
        for v in rest {
            let p = self.pts[v as usize];
            let start = self.last;
            let t = self.locate(p, start);
            self.dig(v, t);
        }
        if self.hint_cell.is_some() {
            self.hints.clear();
            for v in 0..self.pts.len() as u32 {
                if self.alive[v as usize] {
                    self.record_hint(v);
                }
            }
        }
    }

    /// Sets neighbour pointers among a small set of triangles by matching
    /// reversed directed edges.
    fn link_by_edges(&mut self, ids: &[u32]) {
        let mut edges: HashMap<(u32, u32), (u32, usize)> = HashMap::new();
        for &t in ids {
            let v = self.tris[t as usize].v;
            for i in 0..3 {
                edges.insert((v[(i + 1) % 3], v[(i + 2) % 3]), (t, i));
            }
        }
        for &t in ids {
            let v = self.tris[t as usize].v;
            for i in 0..3 {
                if let Some(&(o, _)) = edges.get(&(v[(i + 2) % 3], v[(i + 1) % 3])) {
                    self.tris[t as usize].n[i] = o;
                }
            }
        }
    }

    fn in_conflict(&self, t: u32, p: [f64; 2]) -> bool {
        let v = self.tris[t as usize].v;
        if let Some(k) = v.iter().position(|&x| x == INFINITE_VERTEX) {
            let u = self.pts[v[(k + 1) % 3] as usize];
            let w = self.pts[v[(k + 2) % 3] as usize];
            let o = orient(u, w, p);
            o > 0.0 || (o == 0.0 && strictly_between(u, w, p))
        } else {
            incircle(self.pts[v[0] as usize], self.pts[v[1] as usize], self.pts[v[2] as usize], p) > 0.0
        }
    }

    /// Visibility walk towards `p`. Returns a triangle in conflict with `p`
    /// (a finite triangle whose closure holds `p`, or a ghost triangle whose
    /// outer half-plane holds it).
    fn locate(&mut self, p: [f64; 2], start: u32) -> u32 {
        let mut t = start;
        if self.tris[t as usize].is_ghost() {
            let tri = self.tris[t as usize];
            let k = tri.index_of(INFINITE_VERTEX).unwrap();
            if self.in_conflict(t, p) {
                return t;
            }
            t = tri.n[k];
        }
        loop {
            let tri = self.tris[t as usize];
            if tri.is_ghost() {
                return t;
            }
            self.walk_rot = self.walk_rot.wrapping_add(1);
            let r = (self.walk_rot % 3) as usize;
            let mut next = None;
            for k in 0..3 {
                let i = (r + k) % 3;
                let a = self.pts[tri.v[(i + 1) % 3] as usize];
                let b = self.pts[tri.v[(i + 2) % 3] as usize];
                if orient(a, b, p) < 0.0 {
                    next = Some(tri.n[i]);
                    break;
                }
            }
            match next {
                Some(n) => t = n,
                None => return t,
            }
        }
    }

    fn start_triangle(&self, p: [f64; 2]) -> u32 {
        if let Some(cell) = self.hint_cell {
            let (cx, cy) = ((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64);
            for ring in 0..3i64 {
                for dx in -ring..=ring {
                    for dy in -ring..=ring {
                        if dx.abs() != ring && dy.abs() != ring {
                            continue;
                        }
                        if let Some(&v) = self.hints.get(&(cx + dx, cy + dy)) {
                            if self.is_alive(v) && self.vtri[v as usize] != NONE {
                                return self.vtri[v as usize];
                            }
                        }
                    }
                }
            }
        }
        if self.last != NONE && !self.tris[self.last as usize].is_dead() {
            return self.last;
        }
        self.tris.iter().position(|t| !t.is_dead()).expect("live triangle") as u32
    }

    fn record_hint(&mut self, v: VertexId) {
        if let Some(cell) = self.hint_cell {
            let p = self.pts[v as usize];
            self.hints.insert(((p[0] / cell).floor() as i64, (p[1] / cell).floor() as i64), v);
        }
    }

    /// Inserts a new point and reports the finite triangles destroyed and
    /// created. Ids of removed vertices are reused.
    pub fn insert(&mut self, p: [f64; 2]) -> Result<MeshCavity, GeometryError> {
        let vid = self.push_vertex(p)?;
        if !self.is_triangulated() {
            self.initialise();
            let created = self.finite_triangles().collect();
            return Ok(MeshCavity { vertex: vid, destroyed: Vec::new(), created, location: p });
        }
        let start = self.start_triangle(p);
        let t0 = self.locate(p, start);
        let (destroyed, created) = self.dig(vid, t0);
        self.record_hint(vid);
        Ok(MeshCavity { vertex: vid, destroyed, created, location: p })
    }

    /// Cavity retriangulation for vertex `vid` starting at conflict triangle `t0`.
    fn dig(&mut self, vid: u32, t0: u32) -> (Vec<[u32; 3]>, Vec<[u32; 3]>) {
        let p = self.pts[vid as usize];
        self.stamp = self.stamp.wrapping_add(1);
        if self.stamp == 0 {
            for m in &mut self.mark {
                *m = (0, false);
            }
            self.stamp = 1;
        }
        let stamp = self.stamp;
        let mut conflict = vec![t0];
        self.mark[t0 as usize] = (stamp, true);
        let mut boundary: Vec<(u32, usize)> = Vec::new();
        let mut idx = 0;
        while idx < conflict.len() {
            let t = conflict[idx];
            idx += 1;
            for i in 0..3 {
                let nb = self.tris[t as usize].n[i];
                let (s, c) = self.mark[nb as usize];
                if s == stamp {
                    if !c {
                        boundary.push((t, i));
                    }
                    continue;
                }
                if self.in_conflict(nb, p) {
                    self.mark[nb as usize] = (stamp, true);
                    conflict.push(nb);
                } else {
                    self.mark[nb as usize] = (stamp, false);
                    boundary.push((t, i));
                }
            }
        }

        let mut first: Vec<(u32, u32)> = Vec::with_capacity(boundary.len());
        let mut created = Vec::with_capacity(boundary.len());
        let mut new_ids = Vec::with_capacity(boundary.len());
        for &(t, i) in &boundary {
            let tri = self.tris[t as usize];
            let x = tri.v[(i + 1) % 3];
            let y = tri.v[(i + 2) % 3];
            let o = tri.n[i];
            let nt = self.alloc(Tri { v: [x, y, vid], n: [NONE, NONE, o] });
            let j = self.tris[o as usize].n.iter().position(|&q| q == t).expect("mutual neighbour");
            self.tris[o as usize].n[j] = nt;
            first.push((x, nt));
            new_ids.push(nt);
            if x != INFINITE_VERTEX && y != INFINITE_VERTEX {
                created.push([x, y, vid]);
            }
        }
        first.sort_unstable();
        for &nt in &new_ids {
            let y = self.tris[nt as usize].v[1];
            let k = first.binary_search_by_key(&y, |e| e.0).expect("closed cavity boundary");
            let t2 = first[k].1;
            self.tris[nt as usize].n[0] = t2;
            self.tris[t2 as usize].n[1] = nt;
        }

        let mut destroyed = Vec::with_capacity(conflict.len());
        for &t in &conflict {
            let tri = self.tris[t as usize];
            if !tri.is_ghost() {
                destroyed.push(tri.v);
            }
            self.kill(t);
        }
        for &nt in &new_ids {
            let v = self.tris[nt as usize].v;
            for x in v {
                if x != INFINITE_VERTEX {
                    self.vtri[x as usize] = nt;
                }
            }
            if !self.tris[nt as usize].is_ghost() {
                self.last = nt;
            }
        }
        (destroyed, created)
    }

    /// Removes an interior vertex and retriangulates its star.
    pub fn remove(&mut self, vid: VertexId) -> Result<MeshCavity, GeometryError> {
        if !self.is_alive(vid) {
            return Err(GeometryError::OutsideDomain(f64::NAN, f64::NAN));
        }
        if !self.is_triangulated() {
            return Err(GeometryError::HullVertex);
        }
        let location = self.pts[vid as usize];
        // Star in counterclockwise order: triangle j is (v, a_j, a_{j+1}).
        let start = self.vtri[vid as usize];
        let mut star: Vec<u32> = Vec::new();
        let mut ring: Vec<u32> = Vec::new();
        let mut t = start;
        loop {
            let tri = self.tris[t as usize];
            let i = tri.index_of(vid).expect("incident triangle");
            let a = tri.v[(i + 1) % 3];
            if a == INFINITE_VERTEX || tri.v[(i + 2) % 3] == INFINITE_VERTEX {
                return Err(GeometryError::HullVertex);
            }
            star.push(t);
            ring.push(a);
            t = tri.n[(i + 1) % 3];
            if t == start {
                break;
            }
            if star.len() > self.tris.len() {
                unreachable!("corrupt vertex star");
            }
        }
        // Outside of edge (a_j, a_{j+1}): (neighbour triangle, its edge index).
        let mut poly: Vec<(u32, (u32, usize))> = Vec::with_capacity(ring.len());
        for (j, &t) in star.iter().enumerate() {
            let tri = self.tris[t as usize];
            let i = tri.index_of(vid).unwrap();
            let o = tri.n[i];
            let k = self.tris[o as usize].n.iter().position(|&q| q == t).unwrap();
            poly.push((ring[j], (o, k)));
        }
        let mut created_ids = Vec::new();
        while poly.len() > 3 {
            let m = poly.len();
            let mut chosen = None;
            let mut fallback = None;
            for j in 0..m {
                let u = poly[(j + m - 1) % m].0;
                let w = poly[j].0;
                let x = poly[(j + 1) % m].0;
                let (pu, pw, px) = (self.pts[u as usize], self.pts[w as usize], self.pts[x as usize]);
                if orient(pu, pw, px) <= 0.0 {
                    continue;
                }
                if fallback.is_none() {
                    fallback = Some(j);
                }
                let empty = (0..m)
                    .filter(|&q| q != j && q != (j + 1) % m && q != (j + m - 1) % m)
                    .all(|q| incircle(pu, pw, px, self.pts[poly[q].0 as usize]) <= 0.0);
                if empty {
                    chosen = Some(j);
                    break;
                }
            }
            let j = chosen.or(fallback).expect("star polygon has a convex ear");
            let jm = (j + m - 1) % m;
            let (u, e_uw) = poly[jm];
            let (w, e_wx) = poly[j];
            let x = poly[(j + 1) % m].0;
            let nt = self.alloc(Tri { v: [u, w, x], n: [NONE; 3] });
            self.link(nt, 0, e_wx);
            self.link(nt, 2, e_uw);
            poly[jm] = (u, (nt, 1));
            poly.remove(j);
            created_ids.push(nt);
        }
        let (a, e_ab) = poly[0];
        let (b, e_bc) = poly[1];
        let (c, e_ca) = poly[2];
        let nt = self.alloc(Tri { v: [a, b, c], n: [NONE; 3] });
        self.link(nt, 0, e_bc);
        self.link(nt, 1, e_ca);
        self.link(nt, 2, e_ab);
        created_ids.push(nt);

        let mut destroyed = Vec::with_capacity(star.len());
        for &t in &star {
            destroyed.push(self.tris[t as usize].v);
            self.kill(t);
        }
        let mut created = Vec::with_capacity(created_ids.len());
        for &nt in &created_ids {
            let v = self.tris[nt as usize].v;
            created.push(v);
            for x in v {
                self.vtri[x as usize] = nt;
            }
            self.last = nt;
        }
        self.alive[vid as usize] = false;
        self.vtri[vid as usize] = NONE;
        self.index.remove(&key(location));
        self.n_alive -= 1;
        self.free_vertices.push(vid);
        Ok(MeshCavity { vertex: vid, destroyed, created, location })
    }

    fn link(&mut self, t: u32, i: usize, outer: (u32, usize)) {
        self.tris[t as usize].n[i] = outer.0;
        self.tris[outer.0 as usize].n[outer.1] = t;
    }

    /// Finite triangles with every exactly co-circular Delaunay cell
    /// replaced by its lexicographically smallest triangulation.
    pub fn tie_broken_triangles(&self) -> Vec<[VertexId; 3]> {
        let n = self.tris.len();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        fn find(parent: &mut [u32], mut x: u32) -> u32 {
            while parent[x as usize] != x {
                parent[x as usize] = parent[parent[x as usize] as usize];
                x = parent[x as usize];
            }
            x
        }
        let mut any = false;
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.is_dead() || tri.is_ghost() {
                continue;
            }
            let [a, b, c] = tri.v.map(|v| self.pts[v as usize]);
            for i in 0..3 {
                let nb = tri.n[i] as usize;
                if nb <= t {
                    continue;
                }
                let other = self.tris[nb];
                if other.is_ghost() {
                    continue;
                }
                let q = other
                    .v
                    .iter()
                    .copied()
                    .find(|x| !tri.v.contains(x))
                    .expect("neighbour vertex");
                if incircle(a, b, c, self.pts[q as usize]) == 0.0 {
                    let (ra, rb) = (find(&mut parent, t as u32), find(&mut parent, nb as u32));
                    if ra != rb {
                        parent[ra as usize] = rb;
                        any = true;
                    }
                }
            }
        }
        if !any {
            return self.finite_triangles().collect();
        }
        let mut groups: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut out = Vec::new();
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.is_dead() || tri.is_ghost() {
                continue;
            }
            let r = find(&mut parent, t as u32);
            groups.entry(r).or_default().push(t as u32);
        }
        let mut roots: Vec<u32> = groups.keys().copied().collect();
        roots.sort_unstable();
        for r in roots {
            let members = &groups[&r];
            if members.len() == 1 {
                out.push(self.tris[members[0] as usize].v);
                continue;
            }
            let mut verts: Vec<u32> =
                members.iter().flat_map(|&t| self.tris[t as usize].v).collect();
            verts.sort_unstable();
            verts.dedup();
            let pts: Vec<[f64; 2]> = verts.iter().map(|&v| self.pts[v as usize]).collect();
            for [i, j, k] in lexicographic_min_triangulation(&pts) {
                out.push([verts[i], verts[j], verts[k]]);
            }
        }
        out
    }

    /// Whether some finite triangle incident to `v` is exactly co-circular
    /// with a finite neighbour.
    pub fn ties_around(&self, v: VertexId) -> bool {
        if !self.is_alive(v) || !self.is_triangulated() {
            return false;
        }
        let start = self.vtri[v as usize];
        let mut t = start;
        loop {
            let tri = self.tris[t as usize];
            if !tri.is_ghost() && self.has_cocircular_neighbour(t) {
                return true;
            }
            let i = tri.index_of(v).unwrap();
            t = tri.n[(i + 1) % 3];
            if t == start {
                return false;
            }
        }
    }

    /// Whether any pair of adjacent finite triangles is exactly co-circular.
    pub fn has_ties(&self) -> bool {
        (0..self.tris.len() as u32)
            .any(|t| !self.tris[t as usize].is_dead() && !self.tris[t as usize].is_ghost() && self.has_cocircular_neighbour(t))
    }

    fn has_cocircular_neighbour(&self, t: u32) -> bool {
        let tri = self.tris[t as usize];
        let [a, b, c] = tri.v.map(|x| self.pts[x as usize]);
        tri.n.iter().any(|&nb| {
            let other = self.tris[nb as usize];
            if other.is_ghost() {
                return false;
            }
            let q = other.v.iter().copied().find(|x| !tri.v.contains(x)).unwrap();
            incircle(a, b, c, self.pts[q as usize]) == 0.0
        })
    }

    /// Consistency audit used by tests: neighbour symmetry, orientation and
    /// the local Delaunay property of every finite edge.
    pub fn check(&self) -> Result<(), String> {
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.is_dead() {
                continue;
            }
            for i in 0..3 {
                let nb = tri.n[i];
                if nb == NONE || self.tris[nb as usize].is_dead() {
                    return Err(format!("triangle {t} has no neighbour {i}"));
                }
                if !self.tris[nb as usize].n.contains(&(t as u32)) {
                    return Err(format!("asymmetric neighbour {t} -> {nb}"));
                }
            }
            if !tri.is_ghost() {
                let [a, b, c] = tri.v.map(|v| self.pts[v as usize]);
                if orient(a, b, c) <= 0.0 {
                    return Err(format!("triangle {t} not counterclockwise"));
                }
                for i in 0..3 {
                    let other = self.tris[tri.n[i] as usize];
                    if other.is_ghost() {
                        continue;
                    }
                    let q = other.v.iter().copied().find(|x| !tri.v.contains(x)).unwrap();
                    if incircle(a, b, c, self.pts[q as usize]) > 0.0 {
                        return Err(format!("edge {i} of triangle {t} is not locally Delaunay"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Orders vertex ids along a Hilbert curve over their bounding box.
fn hilbert_sort(pts: &[[f64; 2]], order: &mut [u32]) {
    let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for &v in order.iter() {
        let p = pts[v as usize];
        x0 = x0.min(p[0]);
        y0 = y0.min(p[1]);
        x1 = x1.max(p[0]);
        y1 = y1.max(p[1]);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    const SIDE: u32 = 1 << 16;
    let scale = (SIDE - 1) as f64 / span;
    let mut keyed: Vec<(u64, [u64; 2], u32)> = order
        .iter()
        .map(|&v| {
            let p = pts[v as usize];
            let hx = ((p[0] - x0) * scale) as u32;
            let hy = ((p[1] - y0) * scale) as u32;
            (hilbert_d(SIDE, hx, hy), [p[0].to_bits(), p[1].to_bits()], v)
        })
        .collect();
    keyed.sort_unstable();
    for (slot, k) in order.iter_mut().zip(keyed) {
        *slot = k.2;
    }
}

fn hilbert_d(side: u32, mut x: u32, mut y: u32) -> u64 {
    let mut d = 0u64;
    let mut s = side / 2;
    while s > 0 {
        let rx = u32::from(x & s > 0);
        let ry = u32::from(y & s > 0);
        d += u64::from(s) * u64::from(s) * u64::from((3 * rx) ^ ry);
        if ry == 0 {
            if rx == 1 {
                x = side - 1 - x;
                y = side - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        s /= 2;
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, seed: u64) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| [rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0]).collect()
    }

    #[test]
    fn build_is_locally_delaunay() {
        for seed in 0..20 {
            let pts = random_points(200, seed);
            let m = Mesh::build(&pts).unwrap();
            m.check().unwrap();
            let hull = m.hull_vertices().len();
            assert_eq!(m.finite_triangles().count(), 2 * pts.len() - 2 - hull);
        }
    }

    #[test]
    fn collinear_points_stay_untriangulated_until_lifted() {
        let pts: Vec<[f64; 2]> = (0..5).map(|i| [i as f64, 2.0 * i as f64]).collect();
        let mut m = Mesh::build(&pts).unwrap();
        assert!(!m.is_triangulated());
        let cav = m.insert([0.0, 1.0]).unwrap();
        assert!(cav.destroyed.is_empty());
        assert_eq!(cav.created.len(), 4);
        m.check().unwrap();
    }

    #[test]
    fn collinear_hull_points() {
        let mut pts: Vec<[f64; 2]> = (0..6).map(|i| [i as f64, 0.0]).collect();
        pts.push([2.5, 3.0]);
        pts.push([0.0, 1.0]);
        let m = Mesh::build(&pts).unwrap();
        m.check().unwrap();
        let hull = m.hull_vertices().len();
        assert_eq!(hull, 8);
        assert_eq!(m.finite_triangles().count(), 2 * 8 - 2 - hull);
    }

    #[test]
    fn insert_then_remove_restores_triangulation() {
        let pts = random_points(150, 7);
        let mut frame = vec![[-100.0, -100.0], [120.0, -90.0], [5.0, 130.0]];
        frame.extend(pts.iter().copied());
        let mut m = Mesh::build(&frame).unwrap();
        m.set_hint_cell(1.0);
        let canon = |m: &Mesh| {
            let mut v: Vec<[u64; 6]> = m
                .finite_triangles()
                .map(|t| {
                    let mut ps = t.map(|x| m.point(x));
                    ps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    [
                        ps[0][0].to_bits(),
                        ps[0][1].to_bits(),
                        ps[1][0].to_bits(),
                        ps[1][1].to_bits(),
                        ps[2][0].to_bits(),
                        ps[2][1].to_bits(),
                    ]
                })
                .collect();
            v.sort_unstable();
            v
        };
        let before = canon(&m);
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let p = [rng.gen::<f64>() * 10.0, rng.gen::<f64>() * 10.0];
            let cav = m.insert(p).unwrap();
            assert_eq!(cav.created.len(), cav.destroyed.len() + 2);
            let back = m.remove(cav.vertex).unwrap();
            assert_eq!(back.destroyed.len(), cav.created.len());
            assert_eq!(back.created.len(), cav.destroyed.len());
        }
        m.check().unwrap();
        assert_eq!(before, canon(&m));
        for v in 3..50 {
            m.remove(v).unwrap();
            m.check().unwrap();
        }
        assert_eq!(m.remove(0).unwrap_err(), GeometryError::HullVertex);
    }

    #[test]
    fn duplicate_is_rejected() {
        let mut m = Mesh::build(&random_points(10, 1)).unwrap();
        let p = m.point(3);
        assert!(matches!(m.insert(p), Err(GeometryError::DuplicatePoint(..))));
    }
}
