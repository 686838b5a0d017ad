//! Brute-force ground truth and property verifiers.
//!
//! The naive triangulation, its circumcircles and the matching are written
//! from scratch with integer arithmetic and do not call the geometry kernel.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{DiscreteCDF, Poisson as PoissonDist};
use thiserror::Error;

use crate::geometry::{delaunay, CavityDelta, Point2, Rect, TorusTriangulation, Triangulation};
use crate::hamiltonian::{
    boundary_defect, h_periodic, BoundaryCondition, Configuration, ConfigurationalSystem, EnergySystem, HamiltonianError,
    Window,
};
use crate::interaction::{phi1, phi2, truncate, TrianglePotential};
use crate::sampler::{sample_poisson, uniform_in, ChainState, GibbsModel, SamplerError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("Poisson tail beyond N_max too heavy: bound {bound:.3e} exceeds tolerance {tolerance:.3e}")]
    TailTooHeavy { bound: f64, tolerance: f64 },
    #[error("precondition not met: {0}")]
    PreconditionUnmet(String),
    #[error("naive oracle limited to {max} points, got {got}")]
    TooManyPoints { max: usize, got: usize },
    #[error("point ({0}, {1}) is not on the oracle lattice")]
    OffLattice(f64, f64),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// Naive oracles accept points on the lattice `2^-LATTICE_BITS · Z²`.
pub const LATTICE_BITS: i32 = 20;
/// Lattice coordinates must stay below this in absolute value, which keeps
/// every in-circle determinant inside `i128`.
pub const LATTICE_LIMIT: i64 = 1 << 28;
pub const NAIVE_MAX_POINTS: usize = 64;

const SCALE: f64 = (1u64 << LATTICE_BITS) as f64;

pub fn lattice_point(i: i64, j: i64) -> Point2 {
    Point2::new(i as f64 / SCALE, j as f64 / SCALE)
}

/// Rounds a point to the oracle lattice.
pub fn snap(p: Point2) -> Point2 {
    Point2 { x: (p.x * SCALE).round() / SCALE, y: (p.y * SCALE).round() / SCALE, mark: p.mark }
}

fn to_lattice(p: &Point2) -> Result<[i64; 2], OracleError> {
    let (x, y) = (p.x * SCALE, p.y * SCALE);
    let ok = |v: f64| v.fract() == 0.0 && v.abs() < LATTICE_LIMIT as f64;
    if ok(x) && ok(y) {
        Ok([x as i64, y as i64])
    } else {
        Err(OracleError::OffLattice(p.x, p.y))
    }
}

fn orient_i(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> i128 {
    let (abx, aby) = ((b[0] - a[0]) as i128, (b[1] - a[1]) as i128);
    let (acx, acy) = ((c[0] - a[0]) as i128, (c[1] - a[1]) as i128);
    abx * acy - aby * acx
}

/// Positive when `d` is strictly inside the circle through the
/// counterclockwise triangle `a, b, c`.
fn incircle_i(a: [i64; 2], b: [i64; 2], c: [i64; 2], d: [i64; 2]) -> i128 {
    let r = |p: [i64; 2]| {
        let (x, y) = ((p[0] - d[0]) as i128, (p[1] - d[1]) as i128);
        (x, y, x * x + y * y)
    };
    let (ax, ay, aa) = r(a);
    let (bx, by, bb) = r(b);
    let (cx, cy, cc) = r(c);
    ax * (by * cc - bb * cy) - ay * (bx * cc - bb * cx) + aa * (bx * cy - by * cx)
}

/// A triangle of the naive oracle with its own circumcircle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveTriangle {
    /// Indices into the input, counterclockwise.
    pub vertices: [usize; 3],
    pub center: Point2,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveDelaunay {
    pub points: Vec<Point2>,
    pub triangles: Vec<NaiveTriangle>,
    /// Some empty circle passes through four or more input points.
    pub cocircular: bool,
}

impl NaiveDelaunay {
    /// Vertex coordinates of each triangle, sorted, for set comparison.
    pub fn keys(&self) -> Vec<[(u64, u64); 3]> {
        let mut out: Vec<[(u64, u64); 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let mut k = t.vertices.map(|i| self.points[i].key());
                k.sort();
                k
            })
            .collect();
        out.sort();
        out
    }

    pub fn crossing(&self, delta: &Rect) -> Vec<NaiveTriangle> {
        self.triangles
            .iter()
            .filter(|t| disc_meets(t, delta) && disc_leaves(t, delta))
            .copied()
            .collect()
    }
}

fn disc_meets(t: &NaiveTriangle, r: &Rect) -> bool {
    let dx = (r.x0 - t.center.x).max(0.0).max(t.center.x - r.x1);
    let dy = (r.y0 - t.center.y).max(0.0).max(t.center.y - r.y1);
    dx * dx + dy * dy < t.radius * t.radius
}

fn disc_leaves(t: &NaiveTriangle, r: &Rect) -> bool {
    let (c, rho) = (t.center, t.radius);
    c.x - rho < r.x0 || c.x + rho > r.x1 || c.y - rho < r.y0 || c.y + rho > r.y1
}

fn circumcircle_i(a: [i64; 2], b: [i64; 2], c: [i64; 2]) -> (Point2, f64) {
    let (bx, by) = ((b[0] - a[0]) as i128, (b[1] - a[1]) as i128);
    let (cx, cy) = ((c[0] - a[0]) as i128, (c[1] - a[1]) as i128);
    let d = 2 * (bx * cy - by * cx);
    let (bb, cc) = (bx * bx + by * by, cx * cx + cy * cy);
    let ux = (cy * bb - by * cc) as f64 / d as f64;
    let uy = (bx * cc - cx * bb) as f64 / d as f64;
    let center = Point2::new((a[0] as f64 + ux) / SCALE, (a[1] as f64 + uy) / SCALE);
    (center, ux.hypot(uy) / SCALE)
}

/// Quartic empty-circle scan over all triples.
pub fn naive_delaunay(points: &[Point2]) -> Result<NaiveDelaunay, OracleError> {
    if points.len() > NAIVE_MAX_POINTS {
        return Err(OracleError::TooManyPoints { max: NAIVE_MAX_POINTS, got: points.len() });
    }
    let mut seen = HashSet::new();
    let mut pts = Vec::new();
    for p in points {
        if seen.insert(p.key()) {
            pts.push(*p);
        }
    }
    let q: Vec<[i64; 2]> = pts.iter().map(to_lattice).collect::<Result<_, _>>()?;
    let n = q.len();
    let mut triangles = Vec::new();
    let mut cocircular = false;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let o = orient_i(q[i], q[j], q[k]);
                if o == 0 {
                    continue;
                }
                let v = if o > 0 { [i, j, k] } else { [i, k, j] };
                let mut empty = true;
                let mut tie = false;
                for m in 0..n {
                    if m == i || m == j || m == k {
                        continue;
                    }
                    let s = incircle_i(q[v[0]], q[v[1]], q[v[2]], q[m]);
                    if s > 0 {
                        empty = false;
                        break;
                    }
                    tie |= s == 0;
                }
                if empty {
                    cocircular |= tie;
                    let (center, radius) = circumcircle_i(q[v[0]], q[v[1]], q[v[2]]);
                    triangles.push(NaiveTriangle { vertices: v, center, radius });
                }
            }
        }
    }
    Ok(NaiveDelaunay { points: pts, triangles, cocircular })
}

/// Tile and edge counts against `2n − 2 − ∂` and `3n − 3 − ∂ ≤ 3n − 6`.
pub fn verify_euler(t: &Triangulation) -> bool {
    let n = t.len();
    let tiles = t.tiles();
    if tiles.is_empty() {
        return n < 3;
    }
    let hull = t.hull_vertex_count();
    let mut edges = HashSet::new();
    for tile in &tiles {
        for (a, b) in tile.edges() {
            let (ka, kb) = (a.key(), b.key());
            edges.insert(if ka < kb { (ka, kb) } else { (kb, ka) });
        }
    }
    tiles.len() + 2 + hull == 2 * n && edges.len() + 3 + hull == 3 * n && edges.len() + 6 <= 3 * n
}

/// Torus counts: `2n` tiles and `3n` edge orbits.
pub fn verify_torus_euler(t: &TorusTriangulation) -> bool {
    let n = t.points().len();
    let l = t.period();
    let o = t.origin();
    let q = |v: f64| (v * 1e9).round() as i64;
    let wrap = |p: &Point2| {
        let a = ((p.x - o[0]) / l).floor();
        let b = ((p.y - o[1]) / l).floor();
        (a, b)
    };
    let mut edges = HashSet::new();
    for tile in t.tiles() {
        for (a, b) in tile.edges() {
            let rep = |p: &Point2, r: &Point2| {
                let (i, j) = wrap(p);
                (q(p.x - i * l), q(p.y - j * l), q(r.x - p.x), q(r.y - p.y))
            };
            let (k1, k2) = (rep(&a, &b), rep(&b, &a));
            edges.insert(k1.min(k2));
        }
    }
    t.tiles().len() == 2 * n && edges.len() == 3 * n
}

/// Size of a maximum matching in the bipartite graph of cavity tiles with
/// edges `ρ(created) ≤ ρ(destroyed)`, and the unmatched destroyed count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OrdreResult {
    pub destroyed: usize,
    pub created: usize,
    pub matched: usize,
    pub deficit: usize,
}

pub fn verify_ordre(delta: &CavityDelta) -> OrdreResult {
    let left: Vec<f64> = delta.destroyed.iter().map(|t| t.circumradius).collect();
    let right: Vec<f64> = delta.created.iter().map(|t| t.circumradius).collect();
    let adj: Vec<Vec<usize>> =
        left.iter().map(|&r| (0..right.len()).filter(|&j| right[j] <= r).collect()).collect();
    let matched = max_matching(&adj, right.len());
    OrdreResult { destroyed: left.len(), created: right.len(), matched, deficit: left.len() - matched }
}

fn augment(u: usize, adj: &[Vec<usize>], mate: &mut [Option<usize>], seen: &mut [bool]) -> bool {
    for &v in &adj[u] {
        if seen[v] {
            continue;
        }
        seen[v] = true;
        if mate[v].map_or(true, |w| augment(w, adj, mate, seen)) {
            mate[v] = Some(u);
            return true;
        }
    }
    false
}

/// Augmenting-path maximum bipartite matching.
pub fn max_matching(adj: &[Vec<usize>], right: usize) -> usize {
    let mut mate = vec![None; right];
    (0..adj.len())
        .filter(|&u| {
            let mut seen = vec![false; right];
            augment(u, adj, &mut mate, &mut seen)
        })
        .count()
}

/// Every vertex inside `delta` of a crossing tile of `ζ_Δ ∪ ω_{Δᶜ}` lies on
/// some crossing tile of `ζ`.
pub fn verify_frontiere(delta: &Rect, zeta: &[Point2], omega: &[Point2]) -> Result<bool, OracleError> {
    if zeta.iter().any(|p| delta.on_boundary(p)) {
        return Err(OracleError::PreconditionUnmet("ζ has points on ∂Δ".into()));
    }
    let mut pasted: Vec<Point2> = zeta.iter().filter(|p| delta.contains(p)).copied().collect();
    pasted.extend(omega.iter().filter(|p| !delta.contains_closed(p)));
    let dp = naive_delaunay(&pasted)?;
    let dz = naive_delaunay(zeta)?;
    let covered: HashSet<(u64, u64)> =
        dz.crossing(delta).iter().flat_map(|t| t.vertices.map(|i| dz.points[i].key())).collect();
    Ok(dp.crossing(delta).iter().all(|t| {
        t.vertices.iter().map(|&i| dp.points[i]).filter(|x| delta.contains(x)).all(|x| covered.contains(&x.key()))
    }))
}

/// `H_{k,ω}(ω ∪ {x}) − H_{k,ω}(ω)` against `10 c_φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalBound {
    pub delta_h: f64,
    pub bound: f64,
    pub holds: bool,
}

pub fn verify_local_bound(
    omega: &Configuration,
    x: Point2,
    phi: &TrianglePotential,
    k: u32,
) -> Result<LocalBound, OracleError> {
    let ei = phi
        .eventually_increasing()
        .ok_or_else(|| OracleError::PreconditionUnmet("potential is not eventually increasing".into()))?;
    let w = Window::new(k);
    if !w.rect().contains(&x) {
        return Err(OracleError::PreconditionUnmet("x outside Λ_k".into()));
    }
    let near = omega.points.iter().map(|p| p.dist(&x)).fold(f64::INFINITY, f64::min);
    if near < 2.0 * ei.r_phi {
        return Err(OracleError::PreconditionUnmet(format!("dist(x, ω) = {near:.4} < 2 r_φ")));
    }
    let inner = omega.inside(&w.rect());
    let mut sys = ConfigurationalSystem::new(&inner, omega, w, phi.clone())?;
    let delta_h = sys.insert(x)?;
    let bound = 10.0 * phi.bound();
    Ok(LocalBound { delta_h, bound, holds: delta_h <= bound + 1e-9 })
}

/// `|Λ_k^{(2)}|`: ordered pairs in `Λ_{k−2r_φ}²` at distance at least
/// `2r_φ`.
pub fn lambda2_area(k: u32, r_phi: f64) -> f64 {
    let s = 2.0 * (k as f64 - 2.0 * r_phi) + 1.0;
    let d = 2.0 * r_phi;
    if s <= 0.0 {
        return 0.0;
    }
    if d >= s * std::f64::consts::SQRT_2 {
        return 0.0;
    }
    assert!(d <= s, "closed form needs 2r_φ ≤ side");
    s.powi(4) - (std::f64::consts::PI * s * s * d * d - 8.0 * s * d.powi(3) / 3.0 + d.powi(4) / 2.0)
}

/// Two-point lower bound on `Z_{k,z,ω}` for one boundary configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VacuumBoundCase {
    pub h_empty: f64,
    /// `log(e^{−z v_k} z²/2 ∫_{Λ_k^{(2)}} e^{−H({x,y})})`, Monte Carlo.
    pub log_two_point: f64,
    /// `log(z² |Λ_k^{(2)}| e^{−z v_k} e^{−H(∅) − 20c_φ} / 2)`.
    pub log_lower: f64,
    /// Largest `H({x,y}) − H(∅)` seen, to compare with `20 c_φ`.
    pub max_pair_excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumBoundReport {
    pub k: u32,
    pub lambda2: f64,
    /// `|Λ_k^{(2)}| / v_k²`.
    pub lambda2_ratio: f64,
    /// `2 e^{20c_φ} / (z² |Λ_k^{(2)}|)`, the implied bound on the vacuum
    /// probability.
    pub vacuum_bound: f64,
    pub cases: Vec<VacuumBoundCase>,
}

pub fn verify_vacuum_bound<R: Rng>(
    z: f64,
    phi: &TrianglePotential,
    k: u32,
    boundary: &[Configuration],
    pairs: usize,
    rng: &mut R,
) -> Result<VacuumBoundReport, OracleError> {
    let ei = phi
        .eventually_increasing()
        .ok_or_else(|| OracleError::PreconditionUnmet("potential is not eventually increasing".into()))?;
    let w = Window::new(k);
    let c = phi.bound();
    let l2 = lambda2_area(k, ei.r_phi);
    if l2 <= 0.0 {
        return Err(OracleError::PreconditionUnmet("Λ_k^{(2)} is empty".into()));
    }
    let inner = Rect::centered_square(k as f64 - 2.0 * ei.r_phi + 0.5);
    let side2 = inner.area().powi(2);
    let v = w.volume();
    let mut cases = Vec::new();
    for omega in boundary {
        let model = GibbsModel::configurational(z, phi.clone(), k, omega.clone());
        let mut state = ChainState::new(&model, &[], 0, 0)?;
        let h_empty = state.energy();
        let mut acc = 0.0;
        let mut excess = f64::NEG_INFINITY;
        for _ in 0..pairs {
            let x = uniform_in(&inner, rng);
            let y = uniform_in(&inner, rng);
            if x.dist(&y) < 2.0 * ei.r_phi {
                continue;
            }
            let dh = state.trial_insert(&[x, y])?;
            excess = excess.max(dh);
            acc += (-dh).exp();
        }
        let integral = side2 * acc / pairs as f64;
        let log_two_point = -z * v + (z * z / 2.0).ln() + integral.ln() - h_empty;
        let log_lower = (z * z * l2 / 2.0).ln() - z * v - h_empty - 20.0 * c;
        cases.push(VacuumBoundCase {
            h_empty,
            log_two_point,
            log_lower,
            max_pair_excess: excess,
            holds: log_two_point >= log_lower && excess <= 20.0 * c + 1e-9,
        });
    }
    Ok(VacuumBoundReport {
        k,
        lambda2: l2,
        lambda2_ratio: l2 / (v * v),
        vacuum_bound: 2.0 * (20.0 * c).exp() / (z * z * l2),
        cases,
    })
}

/// Truncated partition function on the torus `Λ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BruteForceZ {
    pub z_hat: f64,
    pub stderr: f64,
    /// Upper bound on the omitted terms `N > N_max`.
    pub truncation: f64,
    pub log_z: f64,
    /// Standard error of `log_z`, including the truncation bound.
    pub log_stderr: f64,
}

/// `Z = e^{−zv} Σ_{k≤N_max} (zv)^k/k! · E[e^{−H}]` over `k` uniform points,
/// each mean by `mc_per_n` draws; the tail uses `|H| ≤ 2 c_φ N`.
pub fn brute_force_z<R: Rng>(
    window: Window,
    z: f64,
    phi: &TrianglePotential,
    n_max: usize,
    mc_per_n: usize,
    tolerance: f64,
    rng: &mut R,
) -> Result<BruteForceZ, OracleError> {
    let v = window.volume();
    let c = phi.bound();
    let inflated = z * v * (2.0 * c).exp();
    let tail = PoissonDist::new(inflated).map(|d| d.sf(n_max as u64)).unwrap_or(1.0) * (inflated - z * v).exp();
    let rect = window.rect();
    let mut total = 0.0;
    let mut var = 0.0;
    for k in 0..=n_max {
        let w = PoissonDist::new(z * v).map(|d| statrs::distribution::Discrete::pmf(&d, k as u64)).unwrap_or(0.0);
        if w == 0.0 {
            continue;
        }
        let draws = if k < 3 || phi.constant_value().is_some() { 1 } else { mc_per_n };
        let mut s = 0.0;
        let mut s2 = 0.0;
        for _ in 0..draws {
            let mut pts: Vec<Point2> = (0..k).map(|_| uniform_in(&rect, rng)).collect();
            if let Some(q) = phi.colours() {
                pts.iter_mut().for_each(|p| p.mark = Some(rng.gen_range(1..=q)));
            }
            let e = (-h_periodic(&pts, window, phi)?).exp();
            s += e;
            s2 += e * e;
        }
        let m = s / draws as f64;
        total += w * m;
        if draws > 1 {
            let var_m = (s2 / draws as f64 - m * m).max(0.0) / (draws - 1) as f64;
            var += w * w * var_m;
        }
    }
    if tail > tolerance * total {
        return Err(OracleError::TailTooHeavy { bound: tail, tolerance: tolerance * total });
    }
    let stderr = var.sqrt();
    Ok(BruteForceZ {
        z_hat: total,
        stderr,
        truncation: tail,
        log_z: total.ln(),
        log_stderr: (stderr + tail) / total,
    })
}

/// Outcome of a verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
    pub skipped: usize,
    /// Suite-specific worst case: a ratio (≤ 1 passes) or an excess
    /// (≤ 0 passes), as named in `margin_kind`.
    pub worst_margin: f64,
    pub margin_kind: String,
    pub counters: BTreeMap<String, f64>,
    pub examples: Vec<String>,
    /// Pass/fail of every case in order.
    pub outcomes: Vec<bool>,
}

impl SuiteReport {
    fn new(suite: &str, margin_kind: &str) -> SuiteReport {
        SuiteReport {
            suite: suite.into(),
            cases: 0,
            failures: 0,
            skipped: 0,
            worst_margin: f64::NEG_INFINITY,
            margin_kind: margin_kind.into(),
            counters: BTreeMap::new(),
            examples: Vec::new(),
            outcomes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }

    fn record(&mut self, ok: bool, margin: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        self.outcomes.push(ok);
        if margin.is_finite() {
            self.worst_margin = self.worst_margin.max(margin);
        }
        if !ok {
            self.failures += 1;
            if self.examples.len() < 10 {
                self.examples.push(what());
            }
        }
    }

    fn bump(&mut self, key: &str, by: f64) {
        *self.counters.entry(key.into()).or_insert(0.0) += by;
    }

    fn max(&mut self, key: &str, v: f64) {
        let e = self.counters.entry(key.into()).or_insert(f64::NEG_INFINITY);
        *e = e.max(v);
    }
}

pub const SUITES: [&str; 7] = ["euler", "cavity", "ordre", "frontiere", "boundary156", "local10", "vacuum"];

/// Default case counts for each suite.
pub fn default_cases(suite: &str) -> usize {
    match suite {
        "euler" => 1000,
        "cavity" | "ordre" => 10_000,
        "vacuum" => 4,
        _ => 1000,
    }
}

pub fn run_suite(suite: &str, cases: usize, seed: u64) -> Result<SuiteReport, OracleError> {
    match suite {
        "euler" => Ok(suite_euler(cases, seed)),
        "cavity" => Ok(suite_cavity(cases, seed)),
        "ordre" => Ok(suite_ordre(cases, seed)),
        "frontiere" => suite_frontiere(cases, seed),
        "boundary156" => suite_boundary156(cases, seed),
        "local10" => suite_local10(cases, seed),
        "vacuum" => suite_vacuum(cases, seed),
        other => Err(OracleError::UnknownSuite(other.into())),
    }
}

/// Random planar triangulations (n ≤ 500) and tori; the first cases with
/// n ≤ 64 are also compared with the naive triangulation.
pub fn suite_euler(cases: usize, seed: u64) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("euler", "max |tiles − (2n−2−∂)| + |torus tiles − 2n|");
    let box10 = Rect::new(0.0, 0.0, 10.0, 10.0);
    for case in 0..cases {
        let n = rng.gen_range(3..=500usize);
        let pts: Vec<Point2> = (0..n).map(|_| snap(uniform_in(&box10, &mut rng))).collect();
        let t = delaunay(&pts, None);
        let planar = verify_euler(&t);
        let dev = (t.tile_count() as f64 + 2.0 + t.hull_vertex_count() as f64 - 2.0 * t.len() as f64).abs();
        let m = n.min(200);
        let tp: Vec<Point2> = pts[..m].to_vec();
        let torus = TorusTriangulation::new(&tp, [0.0, 0.0], 10.0);
        let (tor_ok, tor_dev) = match &torus {
            Ok(tt) => (verify_torus_euler(tt), (tt.tiles().len() as f64 - 2.0 * m as f64).abs()),
            Err(_) => (false, f64::INFINITY),
        };
        let mut naive_ok = true;
        if case < 50 {
            let k = n.min(NAIVE_MAX_POINTS);
            let sub = &pts[..k];
            let nd = naive_delaunay(sub).expect("lattice points");
            if !nd.cocircular {
                let tk: Vec<[(u64, u64); 3]> = delaunay(sub, None)
                    .tiles()
                    .iter()
                    .map(|t| {
                        let mut k = t.vertices.map(|p| p.key());
                        k.sort();
                        k
                    })
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                naive_ok = tk == nd.keys();
                rep.bump("naive_compared", 1.0);
            }
        }
        rep.bump("points", n as f64);
        rep.record(planar && tor_ok && naive_ok, dev + tor_dev, || {
            format!("case {case}: n={n} planar={planar} torus={tor_ok} naive={naive_ok}")
        });
    }
    rep
}

struct InsertionStream {
    rng: ChaCha8Rng,
    data: Rect,
    target: Rect,
    tri: Triangulation,
    left: usize,
}

impl InsertionStream {
    /// Poisson(1) configurations around `Λ_8`, refreshed every 500
    /// insertions; insertion sites are uniform in `Λ_8`.
    fn new(seed: u64) -> InsertionStream {
        let rng = ChaCha8Rng::seed_from_u64(seed);
        let target = Window::new(8).rect();
        let data = target.expand(3.0);
        let tri = delaunay(&[], None);
        InsertionStream { rng, data, target, tri, left: 0 }
    }

    fn next(&mut self) -> (Point2, Result<CavityDelta, crate::geometry::GeometryError>) {
        if self.left == 0 {
            let pts = sample_poisson(1.0, &self.data, &mut self.rng);
            self.tri = delaunay(&pts, None);
            self.left = 500;
        }
        self.left -= 1;
        let x = uniform_in(&self.target, &mut self.rng);
        (x, self.tri.insert_cavity(x))
    }
}

/// `#C⁺ = #C + 2`, created tiles contain x, destroyed discs contain x, and
/// periodic comparison against from-scratch triangulation.
pub fn suite_cavity(cases: usize, seed: u64) -> SuiteReport {
    let mut s = InsertionStream::new(seed);
    let mut rep = SuiteReport::new("cavity", "max |#C⁺ − #C − 2|");
    for case in 0..cases {
        let (x, d) = s.next();
        let Ok(d) = d else {
            rep.skipped += 1;
            continue;
        };
        let card = d.created.len() as f64 - d.destroyed.len() as f64 - 2.0;
        let created_ok = d.created.iter().all(|t| t.has_vertex(&x));
        let destroyed_ok = d.destroyed.iter().all(|t| t.circumcenter.dist(&x) < t.circumradius);
        let mut scratch_ok = true;
        if case % 100 == 99 {
            scratch_ok = delaunay(&s.tri.points(), None).tiles() == s.tri.tiles();
            rep.bump("scratch_compared", 1.0);
        }
        rep.bump("destroyed_total", d.destroyed.len() as f64);
        rep.record(card == 0.0 && created_ok && destroyed_ok && scratch_ok, card.abs(), || {
            format!("case {case}: #C={} #C+={} created_ok={created_ok} destroyed_ok={destroyed_ok} scratch_ok={scratch_ok}",
                d.destroyed.len(), d.created.len())
        });
    }
    rep
}

/// Radius-monotone matching of destroyed into created tiles leaves at most
/// four destroyed tiles unmatched.
pub fn suite_ordre(cases: usize, seed: u64) -> SuiteReport {
    let mut s = InsertionStream::new(seed ^ 0x6f72_6472_65);
    let mut rep = SuiteReport::new("ordre", "max deficit − 4");
    for case in 0..cases {
        let (_, d) = s.next();
        let Ok(d) = d else {
            rep.skipped += 1;
            continue;
        };
        let r = verify_ordre(&d);
        rep.bump(&format!("deficit_{}", r.deficit), 1.0);
        rep.max("max_cavity", r.destroyed as f64);
        rep.record(r.deficit <= 4, r.deficit as f64 - 4.0, || format!("case {case}: {r:?}"));
    }
    rep
}

/// Random `(ζ, ω, Δ)` with the naive triangulation.
pub fn suite_frontiere(cases: usize, seed: u64) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("frontiere", "failures");
    let region = Rect::centered_square(3.0);
    while rep.cases < cases {
        let z = rng.gen_range(0.3..1.5);
        let zeta: Vec<Point2> = sample_poisson(z, &region, &mut rng).into_iter().map(snap).collect();
        let omega: Vec<Point2> = sample_poisson(z, &region, &mut rng).into_iter().map(snap).collect();
        if zeta.len() > NAIVE_MAX_POINTS || omega.len() > NAIVE_MAX_POINTS {
            rep.skipped += 1;
            continue;
        }
        let (a, b) = (rng.gen_range(-2.5..0.0), rng.gen_range(0.0..2.5));
        let (c, d) = (rng.gen_range(-2.5..0.0), rng.gen_range(0.0..2.5));
        let delta = Rect::new(a, c, b, d);
        match verify_frontiere(&delta, &zeta, &omega) {
            Ok(ok) => {
                let case = rep.cases;
                rep.record(ok, if ok { 0.0 } else { 1.0 }, || format!("case {case}: Δ={delta:?}"));
            }
            Err(OracleError::PreconditionUnmet(_)) => rep.skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(rep)
}

fn suite_potential(i: usize) -> TrianglePotential {
    match i % 3 {
        0 => phi1(1.0),
        1 => phi2(1.0),
        _ => truncate(phi1(1.0), 2.0, 1.0),
    }
}

/// `|H_per − H_ω| ≤ 156 c_φ (S_n(ω) + S_n(ζ))` for independent Poisson
/// pairs at n ∈ {4, 8}.
pub fn suite_boundary156(cases: usize, seed: u64) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = SuiteReport::new("boundary156", "max defect / budget");
    for case in 0..cases {
        let n = if case % 2 == 0 { 4 } else { 8 };
        let w = Window::new(n);
        let data = w.rect().expand(2.0 * w.half_side() + 8.0);
        let z = rng.gen_range(0.5..2.0);
        let zeta = Configuration::new(sample_poisson(z, &data, &mut rng), data);
        let omega = Configuration::new(sample_poisson(z, &data, &mut rng), data);
        let phi = suite_potential(case);
        let d = boundary_defect(&zeta, &omega, w, &phi)?;
        let ratio = if d.budget > 0.0 { d.defect / d.budget } else if d.defect == 0.0 { 0.0 } else { f64::INFINITY };
        rep.max("max_defect", d.defect);
        rep.bump("s_sum", (d.s_omega + d.s_zeta) as f64);
        rep.record(d.holds(), ratio, || format!("case {case}: n={n} {d:?}"));
    }
    Ok(rep)
}

/// Far insertions under `truncate(φ₁(1), 2, 1)` on `Λ_4`: the disc of
/// radius `2r_φ` around `x` is emptied before inserting.
pub fn suite_local10(cases: usize, seed: u64) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = truncate(phi1(1.0), 2.0, 1.0);
    let r = phi.eventually_increasing().expect("eventually increasing").r_phi;
    let k = 4;
    let w = Window::new(k);
    let data = w.rect().expand(2.0 * (w.half_side() + 2.0 * r) + 4.0);
    let mut rep = SuiteReport::new("local10", "max ΔH − 10c_φ");
    for case in 0..cases {
        let x = uniform_in(&w.rect(), &mut rng);
        let pts: Vec<Point2> =
            sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| p.dist(&x) >= 2.0 * r).collect();
        let omega = Configuration::new(pts, data);
        let b = verify_local_bound(&omega, x, &phi, k)?;
        rep.max("max_delta_h", b.delta_h);
        rep.record(b.holds, b.delta_h - b.bound, || format!("case {case}: x=({:.4},{:.4}) {b:?}", x.x, x.y));
    }
    Ok(rep)
}

/// The two-point bound chain for k ∈ {2, 3, 4} on Poisson boundary data,
/// with `truncate(φ₁(1), ½, 1)` and z = 1.
pub fn suite_vacuum(cases: usize, seed: u64) -> Result<SuiteReport, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phi = truncate(phi1(1.0), 0.5, 1.0);
    let mut rep = SuiteReport::new("vacuum", "max log lower − log two-point");
    for k in 2..=4u32 {
        let w = Window::new(k);
        let data = w.rect().expand(2.0 * w.half_side() + 6.0);
        let boundary: Vec<Configuration> = (0..cases)
            .map(|_| {
                let out: Vec<Point2> =
                    sample_poisson(1.0, &data, &mut rng).into_iter().filter(|p| !w.rect().contains(p)).collect();
                Configuration::new(out, data)
            })
            .collect();
        let r = verify_vacuum_bound(1.0, &phi, k, &boundary, 200, &mut rng)?;
        rep.max(&format!("lambda2_ratio_k{k}"), r.lambda2_ratio);
        for c in &r.cases {
            rep.max("max_pair_excess", c.max_pair_excess);
            rep.record(c.holds, c.log_lower - c.log_two_point, || format!("k={k}: {c:?}"));
        }
    }
    let _ = BoundaryCondition::Periodic;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::constant;

    #[test]
    fn naive_small_cases() {
        let tri = [lattice_point(0, 0), lattice_point(1 << 20, 0), lattice_point(0, 1 << 20)];
        let d = naive_delaunay(&tri).unwrap();
        assert_eq!(d.triangles.len(), 1);
        assert!((d.triangles[0].radius - 0.5f64.sqrt()).abs() < 1e-15);
        assert!((d.triangles[0].center.x - 0.5).abs() < 1e-15);
        let sq = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)];
        let d = naive_delaunay(&sq).unwrap();
        assert!(d.cocircular);
        assert!(naive_delaunay(&[Point2::new(0.1, 0.0)]).is_err());
        let t = delaunay(&sq, None);
        assert!(verify_euler(&t));
        assert_eq!(t.tile_count(), 2);
    }

    #[test]
    fn naive_matches_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = Rect::new(0.0, 0.0, 5.0, 5.0);
        for n in [3usize, 10, 30, 64] {
            let pts: Vec<Point2> = (0..n).map(|_| snap(uniform_in(&r, &mut rng))).collect();
            let nd = naive_delaunay(&pts).unwrap();
            assert!(!nd.cocircular);
            let mut keys: Vec<[(u64, u64); 3]> = delaunay(&pts, None)
                .tiles()
                .iter()
                .map(|t| {
                    let mut k = t.vertices.map(|p| p.key());
                    k.sort();
                    k
                })
                .collect();
            keys.sort();
            assert_eq!(keys, nd.keys());
        }
    }

    #[test]
    fn matching_and_single_tile_cavity() {
        assert_eq!(max_matching(&[vec![0, 1], vec![0], vec![]], 2), 2);
        let mut t = delaunay(&[Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 4.0)], None);
        let d = t.insert_cavity(Point2::new(1.0, 1.0)).unwrap();
        let r = verify_ordre(&d);
        assert_eq!((r.destroyed, r.created), (1, 3));
        assert!(r.deficit <= 1);
    }

    #[test]
    fn brute_force_constant_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = Window::new(1);
        let z0 = brute_force_z(w, 1.0, &constant(0.0), 60, 1, 1e-9, &mut rng).unwrap();
        assert!((z0.z_hat - 1.0).abs() < 1e-9);
        let c = 0.3;
        let b = brute_force_z(w, 1.0, &constant(c), 80, 1, 1e-9, &mut rng).unwrap();
        let m = w.volume();
        let pmf = |k: i32| (-m).exp() * m.powi(k) / (1..=k).map(|i| i as f64).product::<f64>();
        let exact: f64 = (0..=80).map(|k| pmf(k) * if k >= 3 { (-2.0 * c * k as f64).exp() } else { 1.0 }).sum();
        assert!((b.z_hat - exact).abs() < 1e-9 * exact);
        assert!(matches!(
            brute_force_z(w, 5.0, &constant(c), 10, 1, 1e-9, &mut rng),
            Err(OracleError::TailTooHeavy { .. })
        ));
    }

    #[test]
    fn lambda2_limits() {
        assert!((lambda2_area(40, 0.5) / Window::new(40).volume().powi(2) - 1.0).abs() < 0.1);
        assert_eq!(lambda2_area(3, 0.0), Window::new(3).volume().powi(2));
    }

    #[test]
    fn small_suites_pass() {
        for (s, n) in [("euler", 20), ("cavity", 300), ("ordre", 300), ("frontiere", 20), ("local10", 5)] {
            let r = run_suite(s, n, 7).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(run_suite("nope", 1, 0).is_err());
    }
}
