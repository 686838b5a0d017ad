//! Configurational and periodic Hamiltonians, cavity energy differences,
//! range radii and boundary-crossing statistics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::predicates::orient;
use crate::geometry::{
    delaunay, disc_leaves_rect, disc_meets_rect, GeometryError, Point2, Rect, TorusTriangulation,
    Triangulation,
};
use crate::interaction::TrianglePotential;
use crate::spatial::PointGrid;

/// Constant of the boundary estimate `|H_per − H_ω| ≤ γ c_φ (S_n(ω) + S_n(ζ))`.
pub const GAMMA: f64 = 156.0;

/// Default grid pitch for [`range_radius`].
pub const DEFAULT_RANGE_STEP: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error("boundary data window too small: needs margin {needed:.4} around the window, has {available:.4}")]
    InsufficientBoundaryData { needed: f64, available: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The open centred square `Λ_n = ]−n−½, n+½[²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub n: u32,
}

impl Window {
    pub const fn new(n: u32) -> Window {
        Window { n }
    }

    pub fn half_side(&self) -> f64 {
        self.n as f64 + 0.5
    }

    pub fn side(&self) -> f64 {
        2.0 * self.n as f64 + 1.0
    }

    /// `v_n = (2n+1)²`.
    pub fn volume(&self) -> f64 {
        self.side() * self.side()
    }

    pub fn rect(&self) -> Rect {
        Rect::centered_square(self.half_side())
    }

    /// Lower-left corner of the periodic cell `[−n−½, n+½)²`.
    pub fn origin(&self) -> [f64; 2] {
        [-self.half_side(), -self.half_side()]
    }

    /// Area of the open `ρ`-neighbourhood of the window,
    /// `v_n + 4 √v_n ρ + π ρ²`.
    pub fn neighbourhood_area(&self, rho: f64) -> f64 {
        let v = self.volume();
        v + 4.0 * v.sqrt() * rho + std::f64::consts::PI * rho * rho
    }
}

/// A point configuration known exactly on an observation window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub points: Vec<Point2>,
    pub window: Rect,
}

impl Configuration {
    /// Keeps the points lying in the closed observation window.
    pub fn new(points: Vec<Point2>, window: Rect) -> Configuration {
        let points = points.into_iter().filter(|p| window.contains_closed(p)).collect();
        Configuration { points, window }
    }

    pub fn empty(window: Rect) -> Configuration {
        Configuration { points: Vec::new(), window }
    }

    pub fn inside(&self, r: &Rect) -> Vec<Point2> {
        self.points.iter().filter(|p| r.contains(p)).copied().collect()
    }

    pub fn outside(&self, r: &Rect) -> Vec<Point2> {
        self.points.iter().filter(|p| !r.contains(p)).copied().collect()
    }

    /// Upper bound on the range radius of the configuration for `delta`
    /// (see [`range_radius_tiles`]) and check that the observation window
    /// contains the `2r`-neighbourhood that determines every tile whose disc
    /// meets `delta`.
    ///
    /// Returns `None` when no point lies outside `delta`: the outer
    /// configuration is then empty and the tile set needs no certificate.
    pub fn certify(&self, delta: &Rect) -> Result<Option<f64>, HamiltonianError> {
        let out = self.outside(delta);
        if out.is_empty() {
            return Ok(None);
        }
        let available = [
            delta.x0 - self.window.x0,
            delta.y0 - self.window.y0,
            self.window.x1 - delta.x1,
            self.window.y1 - delta.y1,
        ]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
        let r = range_radius_tiles(&out, delta);
        let needed = 2.0 * r * (1.0 + 1e-9);
        if !(needed <= available) {
            return Err(HamiltonianError::InsufficientBoundaryData { needed, available });
        }
        Ok(Some(r))
    }
}

/// Boundary condition of a finite-volume Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Periodic,
    Configurational(Configuration),
}

/// Certified upper bound on the range radius `r_Δ(ω)`: the smallest `r`
/// such that every open `r`-disc meeting `Δ` contains a point of `ω`
/// outside `Δ`.
///
/// Disc centres are scanned on a grid of pitch `step`; the result is
/// inflated by the grid error `step/√2` so that it bounds the continuous
/// quantity. Returns infinity when no finite radius can be certified from
/// the points given.
pub fn range_radius(omega: &[Point2], delta: &Rect, step: f64) -> f64 {
    assert!(step > 0.0, "grid step must be positive");
    let out: Vec<Point2> = omega.iter().filter(|p| !delta.contains(p)).copied().collect();
    if out.is_empty() {
        return f64::INFINITY;
    }
    let (mut bx0, mut by0, mut bx1, mut by1) = (delta.x0, delta.y0, delta.x1, delta.y1);
    for p in &out {
        bx0 = bx0.min(p.x);
        by0 = by0.min(p.y);
        bx1 = bx1.max(p.x);
        by1 = by1.max(p.y);
    }
    let max_ext = [delta.x0 - bx0, delta.y0 - by0, bx1 - delta.x1, by1 - delta.y1]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let e = step / std::f64::consts::SQRT_2;
    if max_ext <= 2.0 * e {
        return f64::INFINITY;
    }
    let bbox_area = ((bx1 - bx0) * (by1 - by0)).max(step * step);
    let grid = PointGrid::with_density(&out, bbox_area);
    let mut ext = (8.0 * step).min(max_ext);
    loop {
        if let Some(r) = range_radius_on(&grid, delta, step, ext) {
            if r + 2.0 * e <= ext {
                return r;
            }
        }
        if ext >= max_ext {
            return f64::INFINITY;
        }
        ext = (2.0 * ext).min(max_ext);
    }
}

/// Upper bound on `r_Δ(ω)` from the Delaunay triangulation of the points
/// outside `Δ`.
///
/// A point of a triangle is within its circumradius of a vertex, so every
/// disc centred in the hull whose radius exceeds the circumradii of all
/// triangles reaching its centre contains a point. Returns infinity when the
/// hull fails to cover the neighbourhood the bound relies on.
pub fn range_radius_tiles(omega: &[Point2], delta: &Rect) -> f64 {
    let out: Vec<Point2> = omega.iter().filter(|p| !delta.contains(p)).copied().collect();
    let t = delaunay(&out, None);
    let mut items: Vec<(f64, f64)> = t
        .iter_tiles()
        .map(|t| ((delta.dist(&t.circumcenter) - t.circumradius).max(0.0), t.circumradius))
        .collect();
    if items.is_empty() {
        return f64::INFINITY;
    }
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pm = 0.0f64;
    let mut found = f64::INFINITY;
    for j in 0..items.len() {
        pm = pm.max(items[j].1);
        let next = items.get(j + 1).map_or(f64::INFINITY, |x| x.0);
        let r = pm.max(items[j].0);
        if r < next {
            found = r;
            break;
        }
    }
    let hull = convex_hull(&out);
    let reach = delta.expand(found);
    let corners = [[reach.x0, reach.y0], [reach.x1, reach.y0], [reach.x1, reach.y1], [reach.x0, reach.y1]];
    let inside = |p: [f64; 2]| {
        (0..hull.len()).all(|i| orient(hull[i], hull[(i + 1) % hull.len()], p) >= 0.0)
    };
    if found.is_finite() && hull.len() >= 3 && corners.into_iter().all(inside) {
        found
    } else {
        f64::INFINITY
    }
}

/// Counterclockwise convex hull (monotone chain).
fn convex_hull(points: &[Point2]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.iter().map(|q| [q.x, q.y]).collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut h: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for &q in iter {
            while h.len() >= start + 2 && orient(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
    }
    h
}

fn range_radius_on(grid: &PointGrid, delta: &Rect, step: f64, ext: f64) -> Option<f64> {
    let e = step / std::f64::consts::SQRT_2;
    let region = delta.expand(ext);
    let nx = (region.width() / step).ceil() as usize;
    let ny = (region.height() / step).ceil() as usize;
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(nx * ny);
    for i in 0..nx {
        for j in 0..ny {
            let g = Point2::new(region.x0 + (i as f64 + 0.5) * step, region.y0 + (j as f64 + 0.5) * step);
            samples.push((delta.dist(&g), grid.nearest_dist(&g)));
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut pm = 0.0f64;
    for j in 0..samples.len() {
        pm = pm.max(samples[j].1);
        let next = if j + 1 < samples.len() { samples[j + 1].0 } else { ext } - e;
        let r = (samples[j].0 - e).max(pm + e);
        if r < next {
            return Some(r);
        }
    }
    None
}

fn sum_meeting<'a>(tiles: impl Iterator<Item = &'a crate::geometry::Tile>, lambda: &Rect, phi: &TrianglePotential) -> f64 {
    tiles
        .filter(|t| disc_meets_rect(&t.circumcenter, t.circumradius, lambda))
        .map(|t| phi.eval(t))
        .sum()
}

/// `H_{Λ,ω}(ζ)`: the sum of `φ` over tiles of `D(ζ_Λ ∪ ω_{Λᶜ})` whose
/// circumdisc meets `Λ`.
pub fn h_config(
    zeta: &[Point2],
    outside: &Configuration,
    window: Window,
    phi: &TrianglePotential,
) -> Result<f64, HamiltonianError> {
    Ok(ConfigurationalSystem::new(zeta, outside, window, phi.clone())?.energy())
}

/// `H_{n,per}(ζ)`: the sum of `φ` over periodic tiles with centre in `Λ_n`.
/// Fewer than three points give 0.
pub fn h_periodic(zeta: &[Point2], window: Window, phi: &TrianglePotential) -> Result<f64, HamiltonianError> {
    let pts = wrap_into_cell(zeta, window);
    if pts.len() < 3 {
        return Ok(0.0);
    }
    if let Some(c) = phi.constant_value() {
        return Ok(2.0 * c * pts.len() as f64);
    }
    let t = TorusTriangulation::new(&pts, window.origin(), window.side())?;
    Ok(t.tiles().iter().map(|t| phi.eval(t)).sum())
}

/// Maps points onto the periodic cell `[−n−½, n+½)²`.
pub fn wrap_into_cell(points: &[Point2], window: Window) -> Vec<Point2> {
    let o = window.origin();
    let l = window.side();
    let wrap = |v: f64, o: f64| {
        let mut w = o + (v - o).rem_euclid(l);
        if w >= o + l {
            w = o;
        }
        w
    };
    points.iter().map(|p| Point2 { x: wrap(p.x, o[0]), y: wrap(p.y, o[1]), mark: p.mark }).collect()
}

/// A system whose energy can be updated by point insertion.
pub trait EnergySystem {
    fn energy(&self) -> f64;
    /// Inserts `x` and returns the energy change.
    fn insert(&mut self, x: Point2) -> Result<f64, HamiltonianError>;
}

/// Energy change caused by inserting `x`.
pub fn delta_h_insert<S: EnergySystem>(state: &mut S, x: Point2) -> Result<f64, HamiltonianError> {
    state.insert(x)
}

/// `ζ_Λ ∪ ω_{Λᶜ}` with its triangulation and current `H_{Λ,ω}`.
#[derive(Debug, Clone)]
pub struct ConfigurationalSystem {
    tri: Triangulation,
    lambda: Rect,
    phi: TrianglePotential,
    energy: f64,
}

impl ConfigurationalSystem {
    pub fn new(
        zeta: &[Point2],
        outside: &Configuration,
        window: Window,
        phi: TrianglePotential,
    ) -> Result<Self, HamiltonianError> {
        let lambda = window.rect();
        outside.certify(&lambda)?;
        let mut pts: Vec<Point2> = zeta.iter().filter(|p| lambda.contains(p)).copied().collect();
        pts.extend(outside.outside(&lambda));
        let tri = delaunay(&pts, Some(lambda));
        let energy = sum_meeting(tri.iter_tiles(), &lambda, &phi);
        Ok(ConfigurationalSystem { tri, lambda, phi, energy })
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }
}

impl EnergySystem for ConfigurationalSystem {
    fn energy(&self) -> f64 {
        self.energy
    }

    fn insert(&mut self, x: Point2) -> Result<f64, HamiltonianError> {
        let d = self.tri.insert_cavity(x)?;
        let dh = sum_meeting(d.created.iter(), &self.lambda, &self.phi)
            - sum_meeting(d.destroyed.iter(), &self.lambda, &self.phi);
        self.energy += dh;
        Ok(dh)
    }
}

/// Points on the torus `Λ_n` with their current `H_{n,per}`.
#[derive(Debug, Clone)]
pub struct PeriodicSystem {
    window: Window,
    phi: TrianglePotential,
    points: Vec<Point2>,
    torus: Option<TorusTriangulation>,
    energy: f64,
}

impl PeriodicSystem {
    pub fn new(zeta: &[Point2], window: Window, phi: TrianglePotential) -> Result<Self, HamiltonianError> {
        let points = wrap_into_cell(zeta, window);
        let (torus, energy) = Self::scratch(&points, window, &phi)?;
        Ok(PeriodicSystem { window, phi, points, torus, energy })
    }

    fn scratch(
        points: &[Point2],
        window: Window,
        phi: &TrianglePotential,
    ) -> Result<(Option<TorusTriangulation>, f64), HamiltonianError> {
        if points.len() < 3 {
            return Ok((None, 0.0));
        }
        let t = TorusTriangulation::new(points, window.origin(), window.side())?;
        let e = t.tiles().iter().map(|t| phi.eval(t)).sum();
        Ok((Some(t), e))
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }
}

impl EnergySystem for PeriodicSystem {
    fn energy(&self) -> f64 {
        self.energy
    }

    fn insert(&mut self, x: Point2) -> Result<f64, HamiltonianError> {
        let x = wrap_into_cell(&[x], self.window)[0];
        if self.points.iter().any(|p| *p == x) {
            return Err(GeometryError::DuplicatePoint(x.x, x.y).into());
        }
        self.points.push(x);
        let before = self.energy;
        match self.torus.as_mut() {
            Some(t) => {
                let d = t.insert_cavity(x)?;
                let dh = d.created.iter().map(|t| self.phi.eval(t)).sum::<f64>()
                    - d.destroyed.iter().map(|t| self.phi.eval(t)).sum::<f64>();
                self.energy += dh;
            }
            None => {
                let (t, e) = Self::scratch(&self.points, self.window, &self.phi)?;
                self.torus = t;
                self.energy = e;
            }
        }
        Ok(self.energy - before)
    }
}

/// Tiles of `D(ω)` crossing the boundary of `delta`, certified from the
/// observation window.
pub fn crossing_number(omega: &Configuration, delta: &Rect) -> Result<usize, HamiltonianError> {
    if omega.points.len() < 3 {
        return Ok(0);
    }
    omega.certify(delta)?;
    let t = delaunay(&omega.points, None);
    Ok(t.iter_tiles()
        .filter(|t| {
            disc_meets_rect(&t.circumcenter, t.circumradius, delta)
                && disc_leaves_rect(&t.circumcenter, t.circumradius, delta)
        })
        .count())
}

/// `S_n(ω) = #S_{Λ_n}(ω)`.
pub fn s_n(omega: &Configuration, window: Window) -> Result<usize, HamiltonianError> {
    crossing_number(omega, &window.rect())
}

/// Moves points lying exactly on the boundary of `Λ_n` one ulp inwards.
pub fn jitter_off_boundary(points: &[Point2], window: Window) -> Vec<Point2> {
    let h = window.half_side();
    let nudge = |v: f64| {
        if v == h {
            f64::from_bits(h.to_bits() - 1)
        } else if v == -h {
            -f64::from_bits(h.to_bits() - 1)
        } else {
            v
        }
    };
    let r = window.rect();
    points
        .iter()
        .map(|p| if r.on_boundary(p) { Point2 { x: nudge(p.x), y: nudge(p.y), mark: p.mark } } else { *p })
        .collect()
}

/// Outcome of the boundary estimate for one pair of configurations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDefect {
    /// `|H_{n,per}(ζ) − H_{n,ω}(ζ)|`.
    pub defect: f64,
    /// `γ c_φ (S_n(ω) + S_n(ζ))`.
    pub budget: f64,
    pub h_periodic: f64,
    pub h_config: f64,
    pub s_omega: usize,
    pub s_zeta: usize,
}

impl BoundaryDefect {
    pub fn holds(&self) -> bool {
        self.defect <= self.budget * (1.0 + 1e-12) + 1e-9
    }
}

pub fn boundary_defect(
    zeta: &Configuration,
    omega: &Configuration,
    window: Window,
    phi: &TrianglePotential,
) -> Result<BoundaryDefect, HamiltonianError> {
    let zeta = Configuration::new(jitter_off_boundary(&zeta.points, window), zeta.window);
    let omega = Configuration::new(jitter_off_boundary(&omega.points, window), omega.window);
    let lambda = window.rect();
    let inner = zeta.inside(&lambda);
    let hp = h_periodic(&inner, window, phi)?;
    let hc = h_config(&inner, &omega, window, phi)?;
    let s_omega = s_n(&omega, window)?;
    let s_zeta = s_n(&zeta, window)?;
    Ok(BoundaryDefect {
        defect: (hp - hc).abs(),
        budget: GAMMA * phi.bound() * (s_omega + s_zeta) as f64,
        h_periodic: hp,
        h_config: hc,
        s_omega,
        s_zeta,
    })
}

/// `|H_{n,ω}(∅)|` against `C S_n(ω)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmptyEnergyBound {
    pub energy: f64,
    pub s_n: usize,
    pub constant: f64,
}

impl EmptyEnergyBound {
    pub fn holds(&self) -> bool {
        self.energy.abs() <= self.constant * self.s_n as f64 + 1e-9
    }
}

/// Checks `|H_{n,ω}(∅)| ≤ C S_n(ω)`; `constant` defaults to `γ c_φ`.
pub fn empty_config_energy_bound(
    omega: &Configuration,
    window: Window,
    phi: &TrianglePotential,
    constant: Option<f64>,
) -> Result<EmptyEnergyBound, HamiltonianError> {
    let omega = Configuration::new(jitter_off_boundary(&omega.points, window), omega.window);
    let energy = h_config(&[], &omega, window, phi)?;
    let s = s_n(&omega, window)?;
    Ok(EmptyEnergyBound { energy, s_n: s, constant: constant.unwrap_or(GAMMA * phi.bound()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{constant, phi1};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform(n: usize, r: &Rect, rng: &mut ChaCha8Rng) -> Vec<Point2> {
        (0..n)
            .map(|_| Point2::new(r.x0 + rng.gen::<f64>() * r.width(), r.y0 + rng.gen::<f64>() * r.height()))
            .collect()
    }

    #[test]
    fn window_geometry() {
        let w = Window::new(2);
        assert_eq!(w.volume(), 25.0);
        assert_eq!(w.rect(), Rect::new(-2.5, -2.5, 2.5, 2.5));
        assert_eq!(w.neighbourhood_area(0.0), 25.0);
    }

    #[test]
    fn periodic_constant_and_empty() {
        let w = Window::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts = uniform(30, &w.rect(), &mut rng);
        assert_eq!(h_periodic(&[], w, &phi1(1.0)).unwrap(), 0.0);
        let t = TorusTriangulation::new(&pts, w.origin(), w.side()).unwrap();
        assert_eq!(t.tiles().len(), 60);
        let h: f64 = t.tiles().iter().map(|_| 0.5).sum();
        assert_eq!(h, h_periodic(&pts, w, &constant(0.5)).unwrap());
        let h1 = h_periodic(&pts, w, &phi1(1.0)).unwrap();
        assert!(h1.abs() <= 2.0 * 30.0);
    }

    #[test]
    fn range_radius_lattice_and_empty() {
        let delta = Rect::centered_square(2.0);
        assert_eq!(range_radius(&[], &delta, 0.1), f64::INFINITY);
        let lattice: Vec<Point2> =
            (-10..=10).flat_map(|i| (-10..=10).map(move |j| Point2::new(i as f64 * 0.5, j as f64 * 0.5))).collect();
        let r = range_radius(&lattice, &delta, 0.05);
        // Discs of radius above ~ half a lattice diagonal near the boundary
        // always catch an outside point; a few spacings is a safe bound.
        assert!(r.is_finite() && r < 2.5, "r = {r}");
        let coarse = range_radius(&lattice, &delta, 0.2);
        let fine = range_radius(&lattice, &delta, 0.05);
        assert!(fine <= coarse + 0.2 / std::f64::consts::SQRT_2 + 1e-12);
    }

    #[test]
    fn tile_bound_against_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let data = Rect::centered_square(12.0);
        let delta = Rect::centered_square(2.5);
        let pts = uniform(576, &data, &mut rng);
        let step = 0.05;
        let grid = range_radius(&pts, &delta, step);
        let tiles = range_radius_tiles(&pts, &delta);
        // Both bound a quantity that is at least the inradius of delta.
        assert!(grid >= 2.5 && tiles >= 2.5);
        assert!(tiles + 2.0 * step >= grid, "tiles {tiles} grid {grid}");
        assert!(tiles < 6.0);
        assert_eq!(range_radius_tiles(&pts[..2], &delta), f64::INFINITY);
    }

    #[test]
    fn config_energy_constant_counts_discs() {
        let w = Window::new(2);
        let data = Rect::centered_square(9.5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let all = uniform(361, &data, &mut rng);
        let omega = Configuration::new(all, data);
        let zeta = uniform(20, &w.rect(), &mut rng);
        let h = h_config(&zeta, &omega, w, &constant(1.0)).unwrap();
        let mut pts: Vec<Point2> = zeta.clone();
        pts.extend(omega.outside(&w.rect()));
        let t = delaunay(&pts, None);
        let count = t.iter_tiles().filter(|t| disc_meets_rect(&t.circumcenter, t.circumradius, &w.rect())).count();
        assert_eq!(h, count as f64);
        assert_eq!(h_config(&[], &Configuration::empty(data), w, &phi1(1.0)).unwrap(), 0.0);
    }

    #[test]
    fn insufficient_data_is_an_error() {
        let w = Window::new(2);
        let data = Rect::centered_square(2.7);
        let ring = [(-2.6, 0.0), (2.6, 0.0), (0.0, 2.6), (0.0, -2.6), (2.6, 2.6)];
        let omega = Configuration::new(ring.iter().map(|&(x, y)| Point2::new(x, y)).collect(), data);
        assert!(matches!(
            h_config(&[], &omega, w, &phi1(1.0)),
            Err(HamiltonianError::InsufficientBoundaryData { .. })
        ));
    }

    #[test]
    fn incremental_energies_match_scratch() {
        let w = Window::new(2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let phi = phi1(1.0);
        let mut sys = PeriodicSystem::new(&[], w, phi.clone()).unwrap();
        let mut pts = Vec::new();
        for _ in 0..25 {
            let x = uniform(1, &w.rect(), &mut rng)[0];
            delta_h_insert(&mut sys, x).unwrap();
            pts.push(x);
            let h = h_periodic(&pts, w, &phi).unwrap();
            assert!((sys.energy() - h).abs() <= 1e-9 * (1.0 + h.abs()));
        }
        let data = Rect::centered_square(9.5);
        let omega = Configuration::new(uniform(361, &data, &mut rng), data);
        let mut cs = ConfigurationalSystem::new(&[], &omega, w, phi.clone()).unwrap();
        let mut zeta = Vec::new();
        for _ in 0..25 {
            let x = uniform(1, &w.rect(), &mut rng)[0];
            delta_h_insert(&mut cs, x).unwrap();
            zeta.push(x);
            let h = h_config(&zeta, &omega, w, &phi).unwrap();
            assert!((cs.energy() - h).abs() <= 1e-9 * (1.0 + h.abs()));
        }
    }
}
