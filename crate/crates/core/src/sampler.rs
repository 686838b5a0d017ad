//! Poisson sampling, birth–death–move Metropolis–Hastings chains for the
//! finite-volume Gibbs kernels, and the block-iid-average construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    delaunay, disc_meets_rect, GeometryError, Mesh, PeriodicMesh, Point2, Rect, Tile, VertexId,
};
use crate::hamiltonian::{h_periodic, BoundaryCondition, Configuration, HamiltonianError, Window};
use crate::interaction::{HardCore, TrianglePotential};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Activity, potential, window and boundary condition of a Gibbs kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GibbsModel {
    pub z: f64,
    pub phi: TrianglePotential,
    pub window: Window,
    pub boundary: BoundaryCondition,
    #[serde(default)]
    pub hard_core: Option<HardCore>,
    #[serde(default)]
    pub colours: Option<u8>,
}

impl GibbsModel {
    pub fn periodic(z: f64, phi: TrianglePotential, n: u32) -> GibbsModel {
        GibbsModel { z, phi, window: Window::new(n), boundary: BoundaryCondition::Periodic, hard_core: None, colours: None }
    }

    pub fn configurational(z: f64, phi: TrianglePotential, n: u32, outside: Configuration) -> GibbsModel {
        GibbsModel {
            z,
            phi,
            window: Window::new(n),
            boundary: BoundaryCondition::Configurational(outside),
            hard_core: None,
            colours: None,
        }
    }

    pub fn with_hard_core(mut self, r0: f64) -> GibbsModel {
        self.hard_core = Some(HardCore { r0 });
        self
    }

    /// Number of colours carried by the points, if marked.
    pub fn colour_count(&self) -> Option<u8> {
        self.colours.or(self.phi.colours())
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(SamplerError::InvalidModel(format!("activity must be positive, got {}", self.z)));
        }
        self.phi.validate().map_err(|e| SamplerError::InvalidModel(e.to_string()))?;
        if let (Some(a), Some(b)) = (self.colours, self.phi.colours()) {
            if a != b {
                return Err(SamplerError::InvalidModel(format!("colours {a} disagree with the potential's {b}")));
            }
        }
        if self.colour_count() == Some(0) {
            return Err(SamplerError::InvalidModel("zero colours".into()));
        }
        if let Some(hc) = self.hard_core {
            if !(hc.r0.is_finite() && hc.r0 >= 0.0) {
                return Err(SamplerError::InvalidModel(format!("hard-core radius {}", hc.r0)));
            }
        }
        Ok(())
    }
}

/// Relative proposal frequencies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProposalWeights {
    pub birth: f64,
    pub death: f64,
    #[serde(rename = "move")]
    pub shift: f64,
}

impl Default for ProposalWeights {
    fn default() -> Self {
        ProposalWeights { birth: 1.0, death: 1.0, shift: 1.0 }
    }
}

fn default_resync() -> u64 {
    100
}

/// Run lengths are counted in sweeps of `v_n` proposals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerConfig {
    pub seed: u64,
    pub sweeps: u64,
    pub burn_in: u64,
    pub thin: u64,
    #[serde(default)]
    pub weights: ProposalWeights,
    /// Sweeps between recomputations of the cached energy.
    #[serde(default = "default_resync")]
    pub resync_every: u64,
}

impl SamplerConfig {
    pub fn new(seed: u64, sweeps: u64, burn_in: u64, thin: u64) -> SamplerConfig {
        SamplerConfig { seed, sweeps, burn_in, thin, weights: ProposalWeights::default(), resync_every: default_resync() }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.sweeps == 0 || self.thin == 0 || self.resync_every == 0 {
            return Err(SamplerError::InvalidConfig("sweeps, thin and resync_every must be positive".into()));
        }
        let w = self.weights;
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !(ok(w.birth) && ok(w.death) && ok(w.shift)) || w.birth + w.death + w.shift <= 0.0 {
            return Err(SamplerError::InvalidConfig("proposal weights must be nonnegative with positive sum".into()));
        }
        if (w.birth > 0.0) != (w.death > 0.0) {
            return Err(SamplerError::InvalidConfig("birth and death must both be enabled or both disabled".into()));
        }
        Ok(())
    }
}

/// `N ~ Poisson(z |region|)` points, i.i.d. uniform on the region.
pub fn sample_poisson<R: Rng + ?Sized>(z: f64, region: &Rect, rng: &mut R) -> Vec<Point2> {
    let mean = z * region.area();
    let n = if mean > 0.0 { Poisson::new(mean).expect("finite positive mean").sample(rng) as usize } else { 0 };
    (0..n).map(|_| uniform_in(region, rng)).collect()
}

/// Poisson sample with i.i.d. uniform marks in `1..=q`.
pub fn sample_poisson_marked<R: Rng + ?Sized>(z: f64, region: &Rect, q: u8, rng: &mut R) -> Vec<Point2> {
    let pts = sample_poisson(z, region, rng);
    pts.into_iter().map(|p| p.with_mark(Some(rng.gen_range(1..=q)))).collect()
}

pub fn uniform_in<R: Rng + ?Sized>(r: &Rect, rng: &mut R) -> Point2 {
    loop {
        let p = Point2::new(r.x0 + rng.gen::<f64>() * r.width(), r.y0 + rng.gen::<f64>() * r.height());
        if r.contains(&p) {
            return p;
        }
    }
}

/// Log acceptance ratio of a birth from `n` to `n + 1` points.
pub fn log_accept_birth(z: f64, volume: f64, n: usize, dh: f64, w: ProposalWeights) -> f64 {
    (z * volume / (n as f64 + 1.0)).ln() - dh + (w.death / w.birth).ln()
}

/// Log acceptance ratio of a death from `n` to `n − 1` points, where `dh`
/// is the energy change of the removal.
pub fn log_accept_death(z: f64, volume: f64, n: usize, dh: f64, w: ProposalWeights) -> f64 {
    (n as f64 / (z * volume)).ln() - dh + (w.birth / w.death).ln()
}

#[derive(Debug, Clone)]
struct PlanarState {
    lambda: Rect,
    mesh: Mesh,
    verts: Vec<Option<Point2>>,
    inside: Vec<VertexId>,
    outside: Vec<Point2>,
}

impl PlanarState {
    fn new(inside: &[Point2], outside: &[Point2], lambda: Rect) -> Result<Self, GeometryError> {
        let mut all = outside.to_vec();
        all.extend_from_slice(inside);
        let raw: Vec<[f64; 2]> = all.iter().map(|p| [p.x, p.y]).collect();
        let mut mesh = Mesh::build(&raw)?;
        mesh.set_hint_cell((lambda.area() / (inside.len().max(1) as f64)).sqrt().min(1.0));
        let verts = all.into_iter().map(Some).collect();
        let inside = (outside.len()..outside.len() + inside.len()).map(|i| i as VertexId).collect();
        Ok(PlanarState { lambda, mesh, verts, inside, outside: outside.to_vec() })
    }

    fn tile(&self, v: [VertexId; 3]) -> Tile {
        let [a, b, c] = v.map(|i| self.verts[i as usize].expect("live vertex"));
        Tile::new(a, b, c).expect("mesh triangle")
    }

    fn energy_of(&self, tris: &[[VertexId; 3]], phi: &TrianglePotential) -> f64 {
        tris.iter()
            .map(|&v| self.tile(v))
            .filter(|t| disc_meets_rect(&t.circumcenter, t.circumradius, &self.lambda))
            .map(|t| phi.eval(&t))
            .sum()
    }

    fn total(&self, phi: &TrianglePotential) -> f64 {
        let mut all = self.outside.clone();
        all.extend(self.points());
        delaunay(&all, None)
            .iter_tiles()
            .filter(|t| disc_meets_rect(&t.circumcenter, t.circumradius, &self.lambda))
            .map(|t| phi.eval(t))
            .sum()
    }

    fn points(&self) -> Vec<Point2> {
        self.inside.iter().map(|&v| self.verts[v as usize].expect("live vertex")).collect()
    }

    fn insert(&mut self, p: Point2, phi: &TrianglePotential) -> Result<f64, GeometryError> {
        let cav = self.mesh.insert([p.x, p.y])?;
        let i = cav.vertex as usize;
        if i >= self.verts.len() {
            self.verts.resize(i + 1, None);
        }
        self.verts[i] = Some(p);
        self.inside.push(cav.vertex);
        Ok(self.energy_of(&cav.created, phi) - self.energy_of(&cav.destroyed, phi))
    }

    /// Removes the inside point at `idx` (swap-remove order). A hull vertex
    /// cannot be removed in place; the state is then rebuilt.
    fn remove(&mut self, idx: usize, phi: &TrianglePotential) -> Result<f64, GeometryError> {
        let v = self.inside[idx];
        match self.mesh.remove(v) {
            Ok(cav) => {
                let dh = self.energy_of(&cav.created, phi) - self.energy_of(&cav.destroyed, phi);
                self.verts[v as usize] = None;
                self.inside.swap_remove(idx);
                Ok(dh)
            }
            Err(GeometryError::HullVertex) => {
                let before = self.total(phi);
                let mut pts = self.points();
                pts.swap_remove(idx);
                *self = PlanarState::new(&pts, &self.outside, self.lambda)?;
                Ok(self.total(phi) - before)
            }
            Err(e) => Err(e),
        }
    }

    fn nearest(&self, p: &Point2, skip: Option<usize>) -> f64 {
        let skip = skip.map(|i| self.inside[i]);
        self.verts
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i as VertexId) != skip)
            .filter_map(|(_, q)| q.map(|q| q.dist(p)))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone)]
enum Backend {
    /// Constant potential on the torus: `H = 2cN` for `N ≥ 3`.
    Counting { points: Vec<Point2>, c: f64, l: f64 },
    Periodic(PeriodicMesh),
    Planar(PlanarState),
}

fn counting_energy(n: usize, c: f64) -> f64 {
    if n >= 3 {
        2.0 * c * n as f64
    } else {
        0.0
    }
}

fn periodic_distance(p: &Point2, q: &Point2, l: f64) -> f64 {
    let mut dx = (p.x - q.x).abs() % l;
    let mut dy = (p.y - q.y).abs() % l;
    dx = dx.min(l - dx);
    dy = dy.min(l - dy);
    dx.hypot(dy)
}

impl Backend {
    fn len(&self) -> usize {
        match self {
            Backend::Counting { points, .. } => points.len(),
            Backend::Periodic(m) => m.len(),
            Backend::Planar(s) => s.inside.len(),
        }
    }

    fn point(&self, i: usize) -> Point2 {
        match self {
            Backend::Counting { points, .. } => points[i],
            Backend::Periodic(m) => m.points()[i],
            Backend::Planar(s) => s.verts[s.inside[i] as usize].expect("live vertex"),
        }
    }

    fn points(&self) -> Vec<Point2> {
        match self {
            Backend::Counting { points, .. } => points.clone(),
            Backend::Periodic(m) => m.points().to_vec(),
            Backend::Planar(s) => s.points(),
        }
    }

    fn periodic_sum(m: &PeriodicMesh, phi: &TrianglePotential) -> f64 {
        m.tiles().iter().map(|t| phi.eval(t)).sum()
    }

    /// Appends `p` and returns the energy change.
    fn insert(&mut self, p: Point2, phi: &TrianglePotential) -> Result<f64, GeometryError> {
        match self {
            Backend::Counting { points, c, .. } => {
                let n = points.len();
                points.push(p);
                Ok(counting_energy(n + 1, *c) - counting_energy(n, *c))
            }
            Backend::Periodic(m) => {
                let d = m.insert(p)?;
                Ok(match m.len() {
                    0..=2 => 0.0,
                    3 => Self::periodic_sum(m, phi),
                    _ => d.created.iter().map(|t| phi.eval(t)).sum::<f64>() - d.destroyed.iter().map(|t| phi.eval(t)).sum::<f64>(),
                })
            }
            Backend::Planar(s) => s.insert(p, phi),
        }
    }

    /// Swap-removes point `i` and returns the energy change.
    fn remove(&mut self, i: usize, phi: &TrianglePotential) -> Result<f64, GeometryError> {
        match self {
            Backend::Counting { points, c, .. } => {
                let n = points.len();
                points.swap_remove(i);
                Ok(counting_energy(n - 1, *c) - counting_energy(n, *c))
            }
            Backend::Periodic(m) => {
                let n = m.len();
                let before = if n == 3 { Self::periodic_sum(m, phi) } else { 0.0 };
                let d = m.remove(i)?;
                Ok(match n {
                    0..=2 => 0.0,
                    3 => -before,
                    _ => d.created.iter().map(|t| phi.eval(t)).sum::<f64>() - d.destroyed.iter().map(|t| phi.eval(t)).sum::<f64>(),
                })
            }
            Backend::Planar(s) => s.remove(i, phi),
        }
    }

    fn nearest(&self, p: &Point2, skip: Option<usize>) -> f64 {
        match self {
            Backend::Counting { points, l, .. } => points
                .iter()
                .enumerate()
                .filter(|(i, _)| Some(*i) != skip)
                .map(|(_, q)| periodic_distance(p, q, *l))
                .fold(f64::INFINITY, f64::min),
            Backend::Periodic(m) => m.nearest_distance(p, skip),
            Backend::Planar(s) => s.nearest(p, skip),
        }
    }
}

/// Acceptance counters of a chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ChainStats {
    pub proposed: [u64; 4],
    pub accepted: [u64; 4],
    pub hard_core_rejections: u64,
    /// Largest `|cached − recomputed|` energy seen at a resync.
    pub max_drift: f64,
}

/// Proposal kinds, indexing [`ChainStats`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    Birth = 0,
    Death = 1,
    Relocate = 2,
    Recolour = 3,
}

/// Current configuration, triangulation, cached energy and random stream
/// of one chain.
#[derive(Debug, Clone)]
pub struct ChainState {
    model: GibbsModel,
    backend: Backend,
    energy: f64,
    rng: ChaCha8Rng,
    steps: u64,
    stats: ChainStats,
}

impl ChainState {
    /// Starts a chain at `initial` (points of the window; others dropped).
    /// `stream` selects an independent random stream for the same seed.
    pub fn new(model: &GibbsModel, initial: &[Point2], seed: u64, stream: u64) -> Result<ChainState, SamplerError> {
        model.validate()?;
        let lambda = model.window.rect();
        let mut start: Vec<Point2> = initial.iter().filter(|p| lambda.contains(p)).copied().collect();
        if let Some(q) = model.colour_count() {
            if start.iter().any(|p| !matches!(p.mark, Some(m) if (1..=q).contains(&m))) {
                return Err(SamplerError::InvalidModel(format!("initial points need marks in 1..={q}")));
            }
        } else {
            start.iter_mut().for_each(|p| p.mark = None);
        }
        let backend = match &model.boundary {
            BoundaryCondition::Periodic => {
                let l = model.window.side();
                start = crate::hamiltonian::wrap_into_cell(&start, model.window);
                match model.phi.constant_value() {
                    Some(c) => Backend::Counting { points: start, c, l },
                    None => Backend::Periodic(PeriodicMesh::new(&start, model.window.origin(), l)?),
                }
            }
            BoundaryCondition::Configurational(outside) => {
                outside.certify(&lambda)?;
                Backend::Planar(PlanarState::new(&start, &outside.outside(&lambda), lambda)?)
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut s = ChainState { model: model.clone(), backend, energy: 0.0, rng, steps: 0, stats: ChainStats::default() };
        s.energy = s.recompute_energy();
        Ok(s)
    }

    pub fn model(&self) -> &GibbsModel {
        &self.model
    }

    pub fn len(&self) -> usize {
        self.backend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<Point2> {
        self.backend.points()
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn stats(&self) -> ChainStats {
        self.stats
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Energy change of adding the points `xs`; the state is left unchanged.
    pub fn trial_insert(&mut self, xs: &[Point2]) -> Result<f64, SamplerError> {
        let n = self.len();
        let mut dh = 0.0;
        for (i, x) in xs.iter().enumerate() {
            match self.backend.insert(*x, &self.model.phi) {
                Ok(d) => dh += d,
                Err(e) => {
                    for j in (0..i).rev() {
                        self.backend.remove(n + j, &self.model.phi)?;
                    }
                    return Err(e.into());
                }
            }
        }
        for j in (0..xs.len()).rev() {
            self.backend.remove(n + j, &self.model.phi)?;
        }
        Ok(dh)
    }

    /// Energy of the current configuration computed from scratch.
    pub fn recompute_energy(&self) -> f64 {
        match &self.backend {
            Backend::Counting { points, c, .. } => counting_energy(points.len(), *c),
            Backend::Periodic(m) => {
                h_periodic(m.points(), self.model.window, &self.model.phi).expect("periodic energy of a valid state")
            }
            Backend::Planar(s) => s.total(&self.model.phi),
        }
    }

    /// Replaces the cached energy by a recomputation; returns the drift.
    pub fn resync(&mut self) -> f64 {
        let e = self.recompute_energy();
        let drift = (e - self.energy).abs();
        self.stats.max_drift = self.stats.max_drift.max(drift);
        self.energy = e;
        drift
    }

    fn hard_core_ok(&self, p: &Point2, skip: Option<usize>) -> bool {
        match self.model.hard_core {
            Some(hc) => self.backend.nearest(p, skip) > hc.r0,
            None => true,
        }
    }

    fn new_mark(&mut self) -> Option<u8> {
        self.model.colour_count().map(|q| self.rng.gen_range(1..=q))
    }

    fn accept(&mut self, log_ratio: f64) -> bool {
        log_ratio >= 0.0 || self.rng.gen::<f64>().ln() < log_ratio
    }

    fn birth(&mut self, w: ProposalWeights) -> Result<bool, SamplerError> {
        let rect = self.model.window.rect();
        let mark = self.new_mark();
        let p = uniform_in(&rect, &mut self.rng).with_mark(mark);
        if !self.hard_core_ok(&p, None) {
            self.stats.hard_core_rejections += 1;
            return Ok(false);
        }
        let n = self.len();
        let dh = self.backend.insert(p, &self.model.phi)?;
        let lr = log_accept_birth(self.model.z, self.model.window.volume(), n, dh, w);
        if self.accept(lr) {
            self.energy += dh;
            Ok(true)
        } else {
            self.backend.remove(n, &self.model.phi)?;
            Ok(false)
        }
    }

    fn death(&mut self, w: ProposalWeights) -> Result<bool, SamplerError> {
        let n = self.len();
        if n == 0 {
            return Ok(false);
        }
        let i = self.rng.gen_range(0..n);
        let p = self.backend.point(i);
        let dh = self.backend.remove(i, &self.model.phi)?;
        let lr = log_accept_death(self.model.z, self.model.window.volume(), n, dh, w);
        if self.accept(lr) {
            self.energy += dh;
            Ok(true)
        } else {
            self.backend.insert(p, &self.model.phi)?;
            Ok(false)
        }
    }

    fn replace(&mut self, i: usize, q: Point2) -> Result<bool, SamplerError> {
        let p = self.backend.point(i);
        let d1 = self.backend.remove(i, &self.model.phi)?;
        let d2 = self.backend.insert(q, &self.model.phi)?;
        if self.accept(-(d1 + d2)) {
            self.energy += d1 + d2;
            Ok(true)
        } else {
            let last = self.len() - 1;
            self.backend.remove(last, &self.model.phi)?;
            self.backend.insert(p, &self.model.phi)?;
            Ok(false)
        }
    }

    fn relocate(&mut self) -> Result<bool, SamplerError> {
        let n = self.len();
        if n == 0 {
            return Ok(false);
        }
        let i = self.rng.gen_range(0..n);
        let rect = self.model.window.rect();
        let q = uniform_in(&rect, &mut self.rng).with_mark(self.backend.point(i).mark);
        if !self.hard_core_ok(&q, Some(i)) {
            self.stats.hard_core_rejections += 1;
            return Ok(false);
        }
        self.replace(i, q)
    }

    fn recolour(&mut self) -> Result<bool, SamplerError> {
        let n = self.len();
        if n == 0 {
            return Ok(false);
        }
        let i = self.rng.gen_range(0..n);
        let p = self.backend.point(i);
        let mark = self.new_mark();
        if mark == p.mark {
            return Ok(true);
        }
        self.replace(i, p.with_mark(mark))
    }
}

/// Applies one proposal to the chain.
pub fn mcmc_step(state: &mut ChainState, weights: ProposalWeights) -> Result<Move, SamplerError> {
    let total = weights.birth + weights.death + weights.shift;
    let u = state.rng.gen::<f64>() * total;
    let kind = if u < weights.birth {
        Move::Birth
    } else if u < weights.birth + weights.death {
        Move::Death
    } else if state.model.colour_count().is_some() && state.rng.gen::<bool>() {
        Move::Recolour
    } else {
        Move::Relocate
    };
    let accepted = match kind {
        Move::Birth => state.birth(weights)?,
        Move::Death => state.death(weights)?,
        Move::Relocate => state.relocate()?,
        Move::Recolour => state.recolour()?,
    };
    state.steps += 1;
    state.stats.proposed[kind as usize] += 1;
    if accepted {
        state.stats.accepted[kind as usize] += 1;
    }
    Ok(kind)
}

/// One emitted configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    /// Production sweep index (after burn-in), starting at 1.
    pub sweep: u64,
    pub points: Vec<Point2>,
    pub energy: f64,
}

impl Sample {
    pub fn count(&self) -> usize {
        self.points.len()
    }
}

/// Runs `burn_in + sweeps` sweeps of `v_n` proposals each and hands every
/// `thin`-th production configuration to `emit`. The cached energy is
/// resynchronised every `resync_every` sweeps and at each emission.
pub fn run_chain_with<F: FnMut(&Sample)>(
    model: &GibbsModel,
    config: &SamplerConfig,
    stream: u64,
    initial: &[Point2],
    mut emit: F,
) -> Result<ChainState, SamplerError> {
    config.validate()?;
    let mut state = ChainState::new(model, initial, config.seed, stream)?;
    let per_sweep = (model.window.volume().round() as u64).max(1);
    for sweep in 1..=config.burn_in + config.sweeps {
        for _ in 0..per_sweep {
            mcmc_step(&mut state, config.weights)?;
        }
        let production = sweep > config.burn_in;
        let emit_now = production && (sweep - config.burn_in) % config.thin == 0;
        if emit_now || sweep % config.resync_every == 0 {
            state.resync();
        }
        if emit_now {
            emit(&Sample { sweep: sweep - config.burn_in, points: state.points(), energy: state.energy });
        }
    }
    Ok(state)
}

/// Collects the thinned sample stream of one chain started empty.
pub fn run_chain(model: &GibbsModel, config: &SamplerConfig) -> Result<Vec<Sample>, SamplerError> {
    let mut out = Vec::new();
    run_chain_with(model, config, 0, &[], |s| out.push(s.clone()))?;
    Ok(out)
}

/// Runs `chains` independent streams in parallel, each started empty.
pub fn run_chains(model: &GibbsModel, config: &SamplerConfig, chains: u64) -> Result<Vec<Vec<Sample>>, SamplerError> {
    use rayon::prelude::*;
    (0..chains)
        .into_par_iter()
        .map(|c| {
            let mut out = Vec::new();
            run_chain_with(model, config, c, &[], |s| out.push(s.clone()))?;
            Ok(out)
        })
        .collect()
}

/// Pastes block samples of `Λ_n` onto an `m × m` lattice of blocks of side
/// `L = 2n+1`, keeps from each block only the points at least `corridor`
/// away from its boundary, and translates the result by `shift` (read
/// modulo `L`). The output window is the centred square of side `mL`.
pub fn block_paste(blocks: &[Vec<Point2>], n: u32, m: u32, corridor: f64, shift: Point2) -> Configuration {
    assert!(!blocks.is_empty() && m > 0);
    let w = Window::new(n);
    let l = w.side();
    let half = 0.5 * m as f64 * l;
    let out = Rect::centered_square(half);
    let inner = Rect::centered_square(w.half_side() - corridor);
    let sx = shift.x.rem_euclid(l);
    let sy = shift.y.rem_euclid(l);
    // One extra row and column of blocks covers the part uncovered by the shift.
    let mut pts = Vec::new();
    let mut k = 0usize;
    for i in -1..m as i64 {
        for j in -1..m as i64 {
            let cx = -half + (i as f64 + 0.5) * l + sx;
            let cy = -half + (j as f64 + 0.5) * l + sy;
            let block = &blocks[k % blocks.len()];
            k += 1;
            for p in block.iter().filter(|p| inner.contains(p)) {
                let q = p.translate(cx, cy);
                if out.contains(&q) {
                    pts.push(q);
                }
            }
        }
    }
    Configuration { points: pts, window: out }
}

/// [`block_paste`] with a uniform random shift over `Λ_n`.
pub fn block_iid_average<R: Rng + ?Sized>(
    blocks: &[Vec<Point2>],
    n: u32,
    m: u32,
    corridor: f64,
    rng: &mut R,
) -> Configuration {
    let shift = uniform_in(&Window::new(n).rect(), rng);
    block_paste(blocks, n, m, corridor, shift)
}

/// `ϑ_x(ω_{Λ,per})` restricted to `query`: the periodic continuation of the
/// window sample translated by `−x`.
pub fn empirical_field_view(omega: &[Point2], window: Window, shift: Point2, query: &Rect) -> Vec<Point2> {
    let l = window.side();
    let translated: Vec<Point2> = omega.iter().map(|p| p.translate(-shift.x, -shift.y)).collect();
    let mut out = Vec::new();
    let span = |lo: f64, hi: f64, v: f64| (((lo - v) / l).floor() as i64 - 1, ((hi - v) / l).ceil() as i64 + 1);
    for p in &translated {
        let (ia, ib) = span(query.x0, query.x1, p.x);
        let (ja, jb) = span(query.y0, query.y1, p.y);
        for i in ia..=ib {
            for j in ja..=jb {
                let q = p.translate(i as f64 * l, j as f64 * l);
                if query.contains(&q) {
                    out.push(q);
                }
            }
        }
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    out
}
