//! Statistical functionals of sample streams.

use std::io::{self, Write};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Poisson as PoissonPmf};
use thiserror::Error;

use crate::geometry::{disc_meets_rect, Point2, Rect, Tile, TorusTriangulation};
use crate::hamiltonian::{s_n, wrap_into_cell, BoundaryCondition, Configuration, HamiltonianError, Window};
use crate::interaction::TrianglePotential;
use crate::sampler::{run_chain_with, sample_poisson, GibbsModel, Sample, SamplerConfig, SamplerError};

/// Number of batches used for batch-means error bars.
pub const BATCHES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("grid too coarse between u = {u0:.4} and u = {u1:.4}")]
    GridTooCoarse { u0: f64, u1: f64 },
    #[error("estimator needs {0}")]
    Precondition(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
}

impl AsRef<[Point2]> for Sample {
    fn as_ref(&self) -> &[Point2] {
        &self.points
    }
}

/// A mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
}

impl Estimate {
    pub const ZERO: Estimate = Estimate { value: 0.0, stderr: 0.0, n_samples: 0 };

    pub fn exact(value: f64) -> Estimate {
        Estimate { value, stderr: 0.0, n_samples: 1 }
    }

    pub fn scale(self, a: f64) -> Estimate {
        Estimate { value: a * self.value, stderr: a.abs() * self.stderr, n_samples: self.n_samples }
    }

    /// Whether `|value − target| ≤ k σ`, with `σ` this error combined
    /// with `target_err` in quadrature.
    pub fn within(&self, target: f64, target_err: f64, k: f64) -> bool {
        (self.value - target).abs() <= k * self.stderr.hypot(target_err)
    }
}

/// Mergeable accumulator of a scalar time series; error bars by batch means.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchMeans {
    values: Vec<f64>,
}

impl BatchMeans {
    pub fn new() -> BatchMeans {
        BatchMeans::default()
    }

    pub fn from_values(values: Vec<f64>) -> BatchMeans {
        BatchMeans { values }
    }

    pub fn push(&mut self, v: f64) {
        self.values.push(v);
    }

    /// Appends another stream; the result does not depend on grouping.
    pub fn merge(&mut self, other: &BatchMeans) {
        self.values.extend_from_slice(&other.values);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Mean with the standard error of `BATCHES` contiguous batch means
    /// (plain i.i.d. error when there are too few values to batch).
    pub fn estimate(&self) -> Estimate {
        let n = self.values.len();
        if n == 0 {
            return Estimate::ZERO;
        }
        let mean = self.mean();
        if n == 1 {
            return Estimate { value: mean, stderr: 0.0, n_samples: 1 };
        }
        let (groups, size) = if n >= 2 * BATCHES { (BATCHES, n / BATCHES) } else { (n, 1) };
        let means: Vec<f64> =
            (0..groups).map(|g| self.values[g * size..(g + 1) * size].iter().sum::<f64>() / size as f64).collect();
        let m = means.iter().sum::<f64>() / groups as f64;
        let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (groups - 1) as f64;
        Estimate { value: mean, stderr: (var / groups as f64).sqrt(), n_samples: n }
    }
}

/// Mean count per unit area.
pub fn intensity<S: AsRef<[Point2]>>(samples: &[S], area: f64) -> Estimate {
    BatchMeans::from_values(samples.iter().map(|s| s.as_ref().len() as f64 / area).collect()).estimate()
}

fn torus_of(points: &[Point2], window: Window) -> Option<TorusTriangulation> {
    let pts = wrap_into_cell(points, window);
    if pts.len() < 3 {
        return None;
    }
    TorusTriangulation::new(&pts, window.origin(), window.side()).ok()
}

/// Empirical centred-tile distribution of torus samples, per unit area.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TileHistogram {
    pub tiles_per_area: Estimate,
    pub intensity: Estimate,
    /// Largest `|#tiles − 2N|` over samples with at least three points.
    pub max_mass_defect: usize,
    /// Log-spaced radius bin edges and per-area tile densities.
    pub radius_edges: Vec<f64>,
    pub radius_density: Vec<f64>,
    /// Ten equal bins of `|c − b| / ρ` on `[0, 1]`, per unit area.
    pub shape_density: Vec<f64>,
    pub mean_phi: Option<f64>,
}

pub fn tile_distribution<S: AsRef<[Point2]> + Sync>(
    samples: &[S],
    window: Window,
    phi: Option<&TrianglePotential>,
) -> TileHistogram {
    const RADIUS_BINS: usize = 24;
    let v = window.volume();
    let lo = 1e-3f64;
    let hi = window.side() / std::f64::consts::SQRT_2;
    let edges: Vec<f64> =
        (0..=RADIUS_BINS).map(|i| lo * (hi / lo).powf(i as f64 / RADIUS_BINS as f64)).collect();
    struct Part {
        tiles: f64,
        points: f64,
        defect: usize,
        radius: Vec<f64>,
        shape: Vec<f64>,
        phi_sum: f64,
    }
    let parts: Vec<Part> = samples
        .par_iter()
        .map(|s| {
            let pts = s.as_ref();
            let mut part = Part {
                tiles: 0.0,
                points: pts.len() as f64,
                defect: 0,
                radius: vec![0.0; RADIUS_BINS],
                shape: vec![0.0; 10],
                phi_sum: 0.0,
            };
            if let Some(t) = torus_of(pts, window) {
                part.tiles = t.tiles().len() as f64;
                part.defect = t.tiles().len().abs_diff(2 * t.points().len());
                for tile in t.tiles() {
                    let r = tile.circumradius;
                    let k = edges.partition_point(|&e| e <= r).clamp(1, RADIUS_BINS) - 1;
                    part.radius[k] += 1.0;
                    let sh = (tile.circumcenter.dist(&tile.barycentre) / r).min(1.0);
                    part.shape[((sh * 10.0) as usize).min(9)] += 1.0;
                    if let Some(phi) = phi {
                        part.phi_sum += phi.eval(tile);
                    }
                }
            }
            part
        })
        .collect();
    let m = parts.len().max(1) as f64;
    let mut radius = vec![0.0; RADIUS_BINS];
    let mut shape = vec![0.0; 10];
    let (mut tiles, mut phi_sum) = (0.0, 0.0);
    for p in &parts {
        radius.iter_mut().zip(&p.radius).for_each(|(a, b)| *a += b / (m * v));
        shape.iter_mut().zip(&p.shape).for_each(|(a, b)| *a += b / (m * v));
        tiles += p.tiles;
        phi_sum += p.phi_sum;
    }
    TileHistogram {
        tiles_per_area: BatchMeans::from_values(parts.iter().map(|p| p.tiles / v).collect()).estimate(),
        intensity: BatchMeans::from_values(parts.iter().map(|p| p.points / v).collect()).estimate(),
        max_mass_defect: parts.iter().map(|p| p.defect).max().unwrap_or(0),
        radius_edges: edges,
        radius_density: radius,
        shape_density: shape,
        mean_phi: phi.map(|_| if tiles > 0.0 { phi_sum / tiles } else { 0.0 }),
    }
}

/// `v_n⁻¹ H_{n,per}` averaged over torus samples.
pub fn energy_density<S: AsRef<[Point2]> + Sync>(samples: &[S], window: Window, phi: &TrianglePotential) -> Estimate {
    let v = window.volume();
    let vals: Vec<f64> = samples
        .par_iter()
        .map(|s| match torus_of(s.as_ref(), window) {
            Some(t) => t.tiles().iter().map(|t| phi.eval(t)).sum::<f64>() / v,
            None => 0.0,
        })
        .collect();
    BatchMeans::from_values(vals).estimate()
}

/// Mean number of tiles of the periodic continuation whose circumdisc
/// covers the origin, and the Palm-side value `∫|B(τ)| μ(dτ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Temperedness {
    pub covering: Estimate,
    pub disc_area: Estimate,
}

pub fn temperedness_stat<S: AsRef<[Point2]> + Sync>(samples: &[S], window: Window) -> Temperedness {
    let v = window.volume();
    let probe = Rect::centered_square(1e-9);
    let origin = Point2::new(0.0, 0.0);
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|s| match torus_of(s.as_ref(), window) {
            Some(t) => {
                let cover = t
                    .periodic_tiles_meeting(&probe)
                    .iter()
                    .filter(|t| t.circumcenter.dist(&origin) < t.circumradius)
                    .count() as f64;
                let area = t.tiles().iter().map(|t| std::f64::consts::PI * t.circumradius.powi(2)).sum::<f64>() / v;
                (cover, area)
            }
            None => (0.0, 0.0),
        })
        .collect();
    Temperedness {
        covering: BatchMeans::from_values(pairs.iter().map(|p| p.0).collect()).estimate(),
        disc_area: BatchMeans::from_values(pairs.iter().map(|p| p.1).collect()).estimate(),
    }
}

/// Both sides of the Palm identity
/// `E H_{n,ω}(ω) = ∫ φ(τ) |Λ_n^{ρ(τ)}| μ_P(dτ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PalmCheck {
    pub lhs: Estimate,
    pub rhs: Estimate,
    /// Paired per-sample difference.
    pub gap: Estimate,
}

/// Palm identity on the periodic continuations of torus samples on
/// `Λ_m`, which are stationary; `n` is the window of the Hamiltonian.
pub fn palm_identity_check<S: AsRef<[Point2]> + Sync>(
    samples: &[S],
    phi: &TrianglePotential,
    n: u32,
    torus: Window,
) -> PalmCheck {
    let w = Window::new(n);
    let lambda = w.rect();
    let vm = torus.volume();
    let pairs: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|s| match torus_of(s.as_ref(), torus) {
            Some(t) => {
                let lhs = t.periodic_tiles_meeting(&lambda).iter().map(|t| phi.eval(t)).sum::<f64>();
                let rhs = t.tiles().iter().map(|t| phi.eval(t) * w.neighbourhood_area(t.circumradius)).sum::<f64>() / vm;
                (lhs, rhs)
            }
            None => (0.0, 0.0),
        })
        .collect();
    PalmCheck {
        lhs: BatchMeans::from_values(pairs.iter().map(|p| p.0).collect()).estimate(),
        rhs: BatchMeans::from_values(pairs.iter().map(|p| p.1).collect()).estimate(),
        gap: BatchMeans::from_values(pairs.iter().map(|p| p.0 - p.1).collect()).estimate(),
    }
}

/// Mean `S_n / v_n` for each window level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryRatio {
    pub rows: Vec<(u32, Estimate)>,
    pub strictly_decreasing: bool,
}

/// `configs` pairs each level with configurations observed around `Λ_n`.
pub fn boundary_ratio(configs: &[(u32, Vec<Configuration>)]) -> Result<BoundaryRatio, EstimatorError> {
    let mut rows = Vec::new();
    for (n, cs) in configs {
        let w = Window::new(*n);
        let vals: Result<Vec<f64>, HamiltonianError> =
            cs.par_iter().map(|c| s_n(c, w).map(|s| s as f64 / w.volume())).collect();
        rows.push((*n, BatchMeans::from_values(vals?).estimate()));
    }
    let strictly_decreasing = rows.windows(2).all(|p| p[1].1.value < p[0].1.value);
    Ok(BoundaryRatio { rows, strictly_decreasing })
}

/// Observation of the periodic continuation of a torus sample around
/// `Λ_n`, after a shift.
pub fn periodic_view(points: &[Point2], torus: Window, n: u32, margin: f64, shift: Point2) -> Configuration {
    let data = Window::new(n).rect().expand(margin);
    let pts = crate::sampler::empirical_field_view(points, torus, shift, &data);
    Configuration::new(pts, data)
}

/// `I_z(Π^u) + Φ̂(Π^u) = z − u + u log(u/z) + Φ̂`.
pub fn poisson_free_energy(u: f64, z: f64, phi_mean_under_u: f64) -> f64 {
    z - u + u * (u / z).ln() + phi_mean_under_u
}

/// Thermodynamic-integration grid for the pressure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureGrid {
    pub points: usize,
    /// Lower end as a fraction of `z`.
    pub lower: f64,
    /// Poisson draws for the `(0, u₀]` stub.
    pub stub_draws: usize,
    /// Relative jump between neighbouring integrand values tolerated
    /// beyond their error bars.
    pub tolerance: f64,
}

impl Default for PressureGrid {
    fn default() -> Self {
        PressureGrid { points: 32, lower: 0.01, stub_draws: 20_000, tolerance: 0.5 }
    }
}

impl PressureGrid {
    pub fn activities(&self, z: f64) -> Vec<f64> {
        let u0 = self.lower * z;
        (0..self.points).map(|i| u0 * (z / u0).powf(i as f64 / (self.points - 1) as f64)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PressureEstimate {
    pub z: f64,
    pub n: u32,
    pub u: Vec<f64>,
    pub mean_count: Vec<Estimate>,
    /// `v_n⁻¹ log Z_{n,u₀}` from the Poisson reference.
    pub stub: Estimate,
    pub p_hat: Estimate,
}

/// Thermodynamic integration of `d/du log Z_{n,u,per} = E_u[N]/u − v_n`
/// on a log-spaced grid, with the stub `log Z_{u₀} = log E_{Π^{u₀}}[e^{−H}]`
/// estimated directly under the Poisson reference.
pub fn pressure(model: &GibbsModel, grid: &PressureGrid, sampler: &SamplerConfig) -> Result<PressureEstimate, EstimatorError> {
    if !matches!(model.boundary, BoundaryCondition::Periodic) {
        return Err(EstimatorError::Precondition("a periodic model".into()));
    }
    if grid.points < 2 || !(grid.lower > 0.0 && grid.lower < 1.0) {
        return Err(EstimatorError::Precondition("at least two grid points below z".into()));
    }
    let w = model.window;
    let v = w.volume();
    let us = grid.activities(model.z);
    let counts: Result<Vec<Estimate>, SamplerError> = us
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let mut m = model.clone();
            m.z = u;
            let mut bm = BatchMeans::new();
            run_chain_with(&m, sampler, i as u64 + 1, &[], |s| bm.push(s.count() as f64))?;
            Ok(bm.estimate())
        })
        .collect();
    let counts = counts?;
    // Integrand against d(log u): E_u[N] − v u.
    let g: Vec<f64> = counts.iter().zip(&us).map(|(c, u)| c.value - v * u).collect();
    for i in 0..us.len() - 1 {
        let jump = (g[i + 1] - g[i]).abs();
        let scale = 0.5 * (g[i].abs() + g[i + 1].abs()).max(v * us[i] * 1e-3);
        let noise = 3.0 * counts[i].stderr.hypot(counts[i + 1].stderr);
        if jump > grid.tolerance * scale + noise {
            return Err(EstimatorError::GridTooCoarse { u0: us[i], u1: us[i + 1] });
        }
    }
    let mut weights = vec![0.0; us.len()];
    for i in 0..us.len() - 1 {
        let h = (us[i + 1] / us[i]).ln();
        weights[i] += 0.5 * h;
        weights[i + 1] += 0.5 * h;
    }
    let integral: f64 = weights.iter().zip(&g).map(|(w, g)| w * g).sum();
    let var: f64 = weights.iter().zip(&counts).map(|(w, c)| (w * c.stderr).powi(2)).sum();
    let stub = poisson_log_z(model, us[0], grid.stub_draws, sampler.seed);
    let p = (integral + stub.value) / v;
    let se = (var + stub.stderr.powi(2)).sqrt() / v;
    Ok(PressureEstimate {
        z: model.z,
        n: w.n,
        u: us,
        mean_count: counts,
        stub: stub.scale(1.0 / v),
        p_hat: Estimate { value: p, stderr: se, n_samples: sampler.sweeps as usize / sampler.thin as usize },
    })
}

/// `log E_{Π^u}[e^{−H_{n,per}}]` by direct Poisson sampling.
fn poisson_log_z(model: &GibbsModel, u: f64, draws: usize, seed: u64) -> Estimate {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let rect = model.window.rect();
    let vals: Vec<f64> = (0..draws)
        .map(|_| {
            let mut pts = sample_poisson(u, &rect, &mut rng);
            if let Some(q) = model.colour_count() {
                pts.iter_mut().for_each(|p| p.mark = Some(rng.gen_range(1..=q)));
            }
            let h = crate::hamiltonian::h_periodic(&pts, model.window, &model.phi).unwrap_or(0.0);
            (-h).exp()
        })
        .collect();
    let e = BatchMeans::from_values(vals).estimate();
    Estimate { value: e.value.ln(), stderr: e.stderr / e.value, n_samples: e.n_samples }
}

/// Result of testing `p̂ ≥ −min_u [I_z(Π^u) + Φ̂(Π^u)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariationalReport {
    pub best_u: f64,
    pub best_free_energy: Estimate,
    /// `p̂ + min F`, nonnegative in theory.
    pub gap: Estimate,
    pub holds: bool,
}

pub fn variational_gap(p_hat: Estimate, candidates: &[(f64, Estimate)]) -> Result<VariationalReport, EstimatorError> {
    let (best_u, best) = candidates
        .iter()
        .copied()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value))
        .ok_or_else(|| EstimatorError::Precondition("at least one candidate".into()))?;
    let gap = Estimate {
        value: p_hat.value + best.value,
        stderr: p_hat.stderr.hypot(best.stderr),
        n_samples: p_hat.n_samples.min(best.n_samples),
    };
    Ok(VariationalReport { best_u, best_free_energy: best, gap, holds: gap.value >= -3.0 * gap.stderr })
}

/// Free energies `z − u + u log(u/z) + Φ̂(Π^u)` with `Φ̂` estimated from
/// `draws` Poisson torus samples on `Λ_n` per activity.
pub fn poisson_candidates<R: Rng>(
    z: f64,
    us: &[f64],
    phi: &TrianglePotential,
    window: Window,
    draws: usize,
    rng: &mut R,
) -> Vec<(f64, Estimate)> {
    let rect = window.rect();
    us.iter()
        .map(|&u| {
            let samples: Vec<Vec<Point2>> = (0..draws).map(|_| sample_poisson(u, &rect, rng)).collect();
            let e = energy_density(&samples, window, phi);
            (u, Estimate { value: poisson_free_energy(u, z, e.value), ..e })
        })
        .collect()
}

/// Conditional vacuum probability of `Λ_k` given one boundary
/// configuration, on the log scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumEstimate {
    pub k: u32,
    pub log_vacuum: Estimate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VacuumReport {
    pub rows: Vec<VacuumEstimate>,
    /// Least-squares slope of `log P(N_k = 0 | ω)` against `log v_k`.
    pub slope: f64,
    pub decreasing: bool,
}

/// `log G_{k,z,ω}(N_k = 0) = −∫₀ᶻ E_u[N_k]/u du`, integrated over a
/// log-spaced grid; the stub `(0, u₀]` uses the exact small-activity
/// limit `E_u[N]/u → ∫_{Λ_k} e^{−(H({x}) − H(∅))} dx`.
pub fn vacuum_log_probability(
    model: &GibbsModel,
    grid: &PressureGrid,
    sampler: &SamplerConfig,
) -> Result<Estimate, EstimatorError> {
    let BoundaryCondition::Configurational(_) = &model.boundary else {
        return Err(EstimatorError::Precondition("a configurational model".into()));
    };
    let w = model.window;
    let us = grid.activities(model.z);
    let counts: Result<Vec<Estimate>, SamplerError> = us
        .par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let mut m = model.clone();
            m.z = u;
            let mut bm = BatchMeans::new();
            run_chain_with(&m, sampler, i as u64 + 1, &[], |s| bm.push(s.count() as f64))?;
            Ok(bm.estimate())
        })
        .collect();
    let counts = counts?;
    let mut state = crate::sampler::ChainState::new(model, &[], sampler.seed, u64::MAX)?;
    let rect = w.rect();
    let mut first = BatchMeans::new();
    for _ in 0..grid.stub_draws {
        let mark = model.colour_count().map(|q| state.rng().gen_range(1..=q));
        let x = crate::sampler::uniform_in(&rect, state.rng()).with_mark(mark);
        let dh = state.trial_insert(&[x])?;
        first.push(w.volume() * (-dh).exp());
    }
    let a0 = first.estimate();
    // ∫ E_u[N]/u du = ∫ E_u[N] d(log u); the stub is a trapezoid from u = 0.
    let mut coef = vec![0.0; us.len()];
    coef[0] = 0.5;
    for i in 0..us.len() - 1 {
        let h = (us[i + 1] / us[i]).ln();
        coef[i] += 0.5 * h;
        coef[i + 1] += 0.5 * h;
    }
    let integral = 0.5 * us[0] * a0.value + coef.iter().zip(&counts).map(|(a, c)| a * c.value).sum::<f64>();
    let var = (0.5 * us[0] * a0.stderr).powi(2)
        + coef.iter().zip(&counts).map(|(a, c)| (a * c.stderr).powi(2)).sum::<f64>();
    Ok(Estimate { value: -integral, stderr: var.sqrt(), n_samples: counts.iter().map(|c| c.n_samples).sum() })
}


/// Vacuum estimates over window levels, each with its own boundary data.
pub fn vacuum_decay(
    models: &[GibbsModel],
    grid: &PressureGrid,
    sampler: &SamplerConfig,
) -> Result<VacuumReport, EstimatorError> {
    let rows: Result<Vec<VacuumEstimate>, EstimatorError> = models
        .iter()
        .map(|m| Ok(VacuumEstimate { k: m.window.n, log_vacuum: vacuum_log_probability(m, grid, sampler)? }))
        .collect();
    let rows = rows?;
    let xs: Vec<f64> = rows.iter().map(|r| Window::new(r.k).volume().ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.log_vacuum.value).collect();
    let slope = least_squares_slope(&xs, &ys);
    let decreasing = ys.windows(2).all(|p| p[1] < p[0]);
    Ok(VacuumReport { rows, slope, decreasing })
}

pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Pearson goodness-of-fit of integer counts against `Poisson(mean)`,
/// merging tail bins until every expected count is at least five.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn poisson_chi_square(counts: &[usize], mean: f64) -> ChiSquare {
    let total = counts.len() as f64;
    let pmf = PoissonPmf::new(mean).expect("positive mean");
    let max = counts.iter().copied().max().unwrap_or(0).max((mean + 10.0 * mean.sqrt()) as usize) + 1;
    let mut observed = vec![0.0; max + 1];
    for &c in counts {
        observed[c.min(max)] += 1.0;
    }
    let mut expected: Vec<f64> = (0..=max).map(|k| total * pmf.pmf(k as u64)).collect();
    expected[max] = total - expected[..max].iter().sum::<f64>();
    // Merge from both ends into bins with expectation ≥ 5.
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for k in 0..=max {
        o += observed[k];
        e += expected[k];
        if e >= 5.0 {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if let Some(last) = bins.last_mut() {
        last.0 += o;
        last.1 += e;
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = bins.len().saturating_sub(1).max(1);
    let p_value = 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(statistic);
    ChiSquare { statistic, dof, p_value }
}

/// Version tag written at the top of every results file.
pub const CSV_SCHEMA: &str = "# delaunay-gibbs results v1";
pub const CSV_HEADER: &str = "name,n,z,u,value,stderr,n_samples,seed";

/// One results row; `u` is empty when the estimator has no auxiliary
/// activity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CsvRow {
    pub name: String,
    pub n: u32,
    pub z: f64,
    pub u: Option<f64>,
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl CsvRow {
    pub fn new(name: &str, n: u32, z: f64, u: Option<f64>, e: Estimate, seed: u64) -> CsvRow {
        CsvRow { name: name.to_string(), n, z, u, value: e.value, stderr: e.stderr, n_samples: e.n_samples, seed }
    }
}

pub fn write_csv<W: Write>(mut out: W, rows: &[CsvRow]) -> io::Result<()> {
    writeln!(out, "{CSV_SCHEMA}")?;
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        let u = r.u.map(|u| format!("{u:?}")).unwrap_or_default();
        writeln!(out, "{},{},{:?},{},{:?},{:?},{},{}", r.name, r.n, r.z, u, r.value, r.stderr, r.n_samples, r.seed)?;
    }
    Ok(())
}

/// Tile values summed over a tile set.
pub fn phi_sum<'a>(tiles: impl IntoIterator<Item = &'a Tile>, phi: &TrianglePotential) -> f64 {
    tiles.into_iter().map(|t| phi.eval(t)).sum()
}

/// Count of tiles in `tiles` whose circumdisc meets `r`.
pub fn count_meeting<'a>(tiles: impl IntoIterator<Item = &'a Tile>, r: &Rect) -> usize {
    tiles.into_iter().filter(|t| disc_meets_rect(&t.circumcenter, t.circumradius, r)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interaction::{constant, phi1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn poisson_samples(z: f64, w: Window, m: usize, seed: u64) -> Vec<Vec<Point2>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..m).map(|_| sample_poisson(z, &w.rect(), &mut rng)).collect()
    }

    #[test]
    fn batch_means_basics() {
        assert_eq!(BatchMeans::new().estimate(), Estimate::ZERO);
        let mut a = BatchMeans::from_values((0..100).map(|i| (i % 2) as f64).collect());
        let e = a.estimate();
        assert_eq!(e.value, 0.5);
        assert_eq!(e.n_samples, 100);
        let b = BatchMeans::from_values(vec![1.0; 10]);
        a.merge(&b);
        assert_eq!(a.len(), 110);
    }

    #[test]
    fn poisson_intensity_and_mass_identity() {
        let w = Window::new(2);
        let s = poisson_samples(1.0, w, 400, 1);
        let i = intensity(&s, w.volume());
        assert!(i.within(1.0, 0.0, 3.0), "{i:?}");
        let empty: Vec<Vec<Point2>> = vec![vec![]; 3];
        assert_eq!(intensity(&empty, 25.0).value, 0.0);
        let h = tile_distribution(&s, w, Some(&phi1(1.0)));
        assert_eq!(h.max_mass_defect, 0);
        assert!((h.tiles_per_area.value - 2.0 * h.intensity.value).abs() < 1e-12);
        let e = energy_density(&s, w, &constant(0.7));
        assert!((e.value - 1.4 * i.value).abs() < 1e-9);
    }

    #[test]
    fn palm_sides_agree_for_constant() {
        let w = Window::new(3);
        let s = poisson_samples(1.0, w, 200, 2);
        let c = palm_identity_check(&s, &constant(0.0), 1, w);
        assert_eq!((c.lhs.value, c.rhs.value), (0.0, 0.0));
        let c = palm_identity_check(&s, &constant(1.0), 1, w);
        assert!(c.gap.within(0.0, 0.0, 3.5), "{c:?}");
    }

    #[test]
    fn free_energy_closed_form() {
        assert_eq!(poisson_free_energy(2.0, 2.0, 0.0), 0.0);
        assert!((poisson_free_energy(1.0, 2.0, 0.0) - (1.0 - 2f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn chi_square_accepts_poisson() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = Rect::centered_square(2.5);
        let counts: Vec<usize> = (0..5000).map(|_| sample_poisson(1.0, &r, &mut rng).len()).collect();
        let t = poisson_chi_square(&counts, 25.0);
        assert!(t.p_value > 0.001, "{t:?}");
        let shifted: Vec<usize> = counts.iter().map(|c| c + 3).collect();
        assert!(poisson_chi_square(&shifted, 25.0).p_value < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let rows = vec![CsvRow::new("intensity", 2, 1.0, None, Estimate { value: 0.5, stderr: 0.1, n_samples: 9 }, 7)];
        write_csv(&mut buf, &rows).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s, format!("{CSV_SCHEMA}\n{CSV_HEADER}\nintensity,2,1.0,,0.5,0.1,9,7\n"));
    }
}
