use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use delaunay_gibbs::estimators::{
    boundary_ratio, energy_density, intensity, periodic_view, poisson_candidates, pressure, temperedness_stat,
    tile_distribution, vacuum_decay, variational_gap, write_csv, CsvRow, Estimate, EstimatorError, PressureGrid,
};
use delaunay_gibbs::oracles::{default_cases, run_suite, OracleError, SuiteReport, SUITES};
use delaunay_gibbs::sampler::{run_chain, run_chain_with, sample_poisson, Sample};
use delaunay_gibbs::snapshot::{Domain, Snapshot};
use delaunay_gibbs::{BoundaryCondition, Configuration, GibbsModel, HamiltonianError, Point2, SamplerError, Window};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{BoundaryConfig, ConfigError, ExperimentConfig, SweepParameter};

pub const ESTIMATORS: [&str; 8] =
    ["intensity", "tiles", "energy", "temperedness", "boundary_ratio", "pressure", "variational", "vacuum"];

const TRACE_SCHEMA: &str = "# delaunay-gibbs trace v1";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("unknown estimator {0:?}; expected one of {ESTIMATORS:?}")]
    UnknownEstimator(String),
    #[error("unknown suite {0:?}; expected one of {SUITES:?}")]
    UnknownSuite(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("outside-data file {0} not found")]
    MissingOutside(PathBuf),
    #[error("outside-data file {path}: {msg}")]
    BadOutside { path: PathBuf, msg: String },
    #[error(transparent)]
    InsufficientBoundary(HamiltonianError),
    #[error("suite {0} failed")]
    SuiteFailed(String),
    #[error("{0}")]
    Runtime(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::SuiteFailed(_) => 1,
            CliError::Config(_)
            | CliError::UnknownEstimator(_)
            | CliError::UnknownSuite(_)
            | CliError::Unsupported(_)
            | CliError::BadOutside { .. } => 2,
            CliError::MissingOutside(_) | CliError::InsufficientBoundary(_) => 3,
            CliError::Runtime(_) | CliError::Io { .. } => 4,
        }
    }
}

impl From<HamiltonianError> for CliError {
    fn from(e: HamiltonianError) -> CliError {
        match e {
            HamiltonianError::InsufficientBoundaryData { .. } => CliError::InsufficientBoundary(e),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<SamplerError> for CliError {
    fn from(e: SamplerError) -> CliError {
        match e {
            SamplerError::Hamiltonian(h) => h.into(),
            SamplerError::InvalidModel(_) | SamplerError::InvalidConfig(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<EstimatorError> for CliError {
    fn from(e: EstimatorError) -> CliError {
        match e {
            EstimatorError::Sampler(s) => s.into(),
            EstimatorError::Hamiltonian(h) => h.into(),
            EstimatorError::Precondition(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> CliError {
        match e {
            OracleError::UnknownSuite(s) => CliError::UnknownSuite(s),
            OracleError::Hamiltonian(h) => h.into(),
            OracleError::Sampler(s) => s.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.into(), source };
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, bytes).map_err(io)
}

fn boundary_seed(seed: u64, n: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(0x626f_756e_6461_7279 ^ n as u64);
    rng
}

/// The Gibbs kernel of the config at window level `n`.
pub fn build_model(cfg: &ExperimentConfig, n: u32) -> Result<GibbsModel, CliError> {
    let m = &cfg.model;
    let boundary = match &m.boundary {
        BoundaryConfig::Periodic => BoundaryCondition::Periodic,
        BoundaryConfig::Configurational { outside } => {
            let text = fs::read_to_string(outside).map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound => CliError::MissingOutside(outside.clone()),
                _ => CliError::Io { path: outside.clone(), source: e },
            })?;
            let snap = Snapshot::parse(&text)
                .map_err(|e| CliError::BadOutside { path: outside.clone(), msg: e.to_string() })?;
            let Domain::Window(rect) = snap.domain else {
                return Err(CliError::BadOutside { path: outside.clone(), msg: "expected a window header".into() });
            };
            BoundaryCondition::Configurational(Configuration::new(snap.points, rect))
        }
        BoundaryConfig::PoissonOutside { intensity, margin } => {
            let w = Window::new(n);
            let data = w.rect().expand(*margin);
            let mut rng = boundary_seed(cfg.sampler.seed, n);
            let pts = match m.q {
                Some(q) => delaunay_gibbs::sampler::sample_poisson_marked(*intensity, &data, q, &mut rng),
                None => sample_poisson(*intensity, &data, &mut rng),
            };
            let out: Vec<Point2> = pts.into_iter().filter(|p| !w.rect().contains_closed(p)).collect();
            BoundaryCondition::Configurational(Configuration::new(out, data))
        }
    };
    let mut model = GibbsModel {
        z: m.z,
        phi: m.potential.clone(),
        window: Window::new(n),
        boundary,
        hard_core: None,
        colours: m.q,
    };
    if let Some(r0) = m.r0 {
        model = model.with_hard_core(r0);
    }
    model.validate()?;
    Ok(model)
}

fn require_periodic(model: &GibbsModel, what: &str) -> Result<(), CliError> {
    match model.boundary {
        BoundaryCondition::Periodic => Ok(()),
        _ => Err(CliError::Unsupported(format!("estimator {what} needs a periodic boundary"))),
    }
}

fn snapshot_of(model: &GibbsModel, s: &Sample) -> Snapshot {
    let w = model.window;
    match &model.boundary {
        BoundaryCondition::Periodic => {
            let o = w.origin();
            let points = s.points.iter().map(|p| Point2 { x: p.x - o[0], y: p.y - o[1], mark: p.mark }).collect();
            Snapshot { domain: Domain::Torus(w.side()), points }
        }
        BoundaryCondition::Configurational(_) => Snapshot { domain: Domain::Window(w.rect()), points: s.points.clone() },
    }
}

/// Thinned snapshots under `snapshots/` and a `trace.csv` of counts and
/// energies.
pub fn cmd_sample(cfg: &ExperimentConfig, out: &Path) -> Result<usize, CliError> {
    let model = build_model(cfg, cfg.model.n)?;
    let mut trace = format!("{TRACE_SCHEMA}\nsweep,count,energy\n");
    let mut snaps = Vec::new();
    run_chain_with(&model, &cfg.sampler, 0, &[], |s| {
        trace.push_str(&format!("{},{},{:?}\n", s.sweep, s.count(), s.energy));
        let comment = format!("sweep {} seed {}", s.sweep, cfg.sampler.seed);
        snaps.push((s.sweep, snapshot_of(&model, s).render(Some(&comment))));
    })?;
    for (sweep, text) in &snaps {
        write_file(&out.join("snapshots").join(format!("sample_{sweep:08}.txt")), text.as_bytes())?;
    }
    write_file(&out.join("trace.csv"), trace.as_bytes())?;
    Ok(snaps.len())
}

fn default_candidates(z: f64) -> Vec<f64> {
    (0..16).map(|i| 0.25 * z * 8f64.powf(i as f64 / 15.0)).collect()
}

/// Result rows of one estimator.
pub fn estimate_rows(cfg: &ExperimentConfig, name: &str) -> Result<Vec<CsvRow>, CliError> {
    if !ESTIMATORS.contains(&name) {
        return Err(CliError::UnknownEstimator(name.into()));
    }
    let n = cfg.model.n;
    let z = cfg.model.z;
    let seed = cfg.sampler.seed;
    let row = |name: &str, n: u32, u: Option<f64>, e: Estimate| CsvRow::new(name, n, z, u, e, seed);
    let grid = PressureGrid::from(&cfg.task.grid);
    let levels = cfg.task.levels.clone();
    let model = build_model(cfg, n)?;
    let w = model.window;
    let mut rows = Vec::new();
    match name {
        "intensity" => {
            let s = run_chain(&model, &cfg.sampler)?;
            rows.push(row("intensity", n, None, intensity(&s, w.volume())));
        }
        "tiles" => {
            require_periodic(&model, name)?;
            let s = run_chain(&model, &cfg.sampler)?;
            let h = tile_distribution(&s, w, Some(&model.phi));
            rows.push(row("tiles_per_area", n, None, h.tiles_per_area));
            rows.push(row("intensity", n, None, h.intensity));
            rows.push(row("mass_identity", n, None, h.intensity.scale(2.0)));
            rows.push(row("max_mass_defect", n, None, Estimate::exact(h.max_mass_defect as f64)));
        }
        "energy" => {
            require_periodic(&model, name)?;
            let s = run_chain(&model, &cfg.sampler)?;
            rows.push(row("energy_density", n, None, energy_density(&s, w, &model.phi)));
        }
        "temperedness" => {
            require_periodic(&model, name)?;
            let s = run_chain(&model, &cfg.sampler)?;
            let t = temperedness_stat(&s, w);
            rows.push(row("covering", n, None, t.covering));
            rows.push(row("disc_area", n, None, t.disc_area));
        }
        "boundary_ratio" => {
            require_periodic(&model, name)?;
            let levels = levels.unwrap_or_else(|| vec![2, 4, 8, 16]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            let mut views: Vec<(u32, Vec<Configuration>)> = levels.iter().map(|&k| (k, Vec::new())).collect();
            run_chain_with(&model, &cfg.sampler, 0, &[], |s| {
                for (k, out) in views.iter_mut() {
                    let shift = Point2::new(rng.gen_range(0.0..w.side()), rng.gen_range(0.0..w.side()));
                    out.push(periodic_view(&s.points, w, *k, 2.0 * Window::new(*k).half_side() + 6.0, shift));
                }
            })?;
            let r = boundary_ratio(&views)?;
            for (k, e) in r.rows {
                rows.push(row("boundary_ratio", k, None, e));
            }
        }
        "pressure" => {
            require_periodic(&model, name)?;
            let p = pressure(&model, &grid, &cfg.sampler)?;
            for (u, c) in p.u.iter().zip(&p.mean_count) {
                rows.push(row("mean_count", n, Some(*u), *c));
            }
            rows.push(row("pressure_stub", n, Some(p.u[0]), p.stub));
            rows.push(row("pressure", n, None, p.p_hat));
        }
        "variational" => {
            require_periodic(&model, name)?;
            let p = pressure(&model, &grid, &cfg.sampler)?;
            let us = cfg.task.candidates.clone().unwrap_or_else(|| default_candidates(z));
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(2);
            let c = poisson_candidates(z, &us, &model.phi, w, cfg.task.draws.unwrap_or(40), &mut rng);
            let r = variational_gap(p.p_hat, &c)?;
            for (u, f) in &c {
                rows.push(row("free_energy", n, Some(*u), *f));
            }
            rows.push(row("pressure", n, None, p.p_hat));
            rows.push(row("variational_gap", n, Some(r.best_u), r.gap));
        }
        "vacuum" => {
            let levels = levels.unwrap_or_else(|| vec![n]);
            let models: Result<Vec<GibbsModel>, CliError> = levels.iter().map(|&k| build_model(cfg, k)).collect();
            let models = models?;
            if levels.len() > 1 && matches!(cfg.model.boundary, BoundaryConfig::Configurational { .. }) {
                return Err(CliError::Unsupported("vacuum over several levels needs poisson_outside data".into()));
            }
            let r = vacuum_decay(&models, &grid, &cfg.sampler)?;
            for v in &r.rows {
                rows.push(row("log_vacuum", v.k, None, v.log_vacuum));
            }
            if r.rows.len() > 1 {
                rows.push(row("vacuum_slope", n, None, Estimate::exact(r.slope)));
            }
        }
        _ => unreachable!(),
    }
    Ok(rows)
}

fn csv_bytes(rows: &[CsvRow]) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&mut out, rows).expect("writing to memory");
    out
}

fn estimator_name(cfg: &ExperimentConfig, arg: Option<&str>) -> Result<String, CliError> {
    arg.map(str::to_owned)
        .or_else(|| cfg.task.estimator.clone())
        .ok_or_else(|| CliError::UnknownEstimator(String::new()))
}

/// Writes `<estimator>.csv`.
pub fn cmd_estimate(cfg: &ExperimentConfig, estimator: Option<&str>, out: &Path) -> Result<PathBuf, CliError> {
    let name = estimator_name(cfg, estimator)?;
    let rows = estimate_rows(cfg, &name)?;
    let path = out.join(format!("{name}.csv"));
    write_file(&path, &csv_bytes(&rows))?;
    Ok(path)
}

/// Writes `verify_<suite>.json`.
pub fn cmd_verify(cfg: &ExperimentConfig, suite: Option<&str>, out: &Path) -> Result<SuiteReport, CliError> {
    let name = suite
        .map(str::to_owned)
        .or_else(|| cfg.task.suite.clone())
        .ok_or_else(|| CliError::UnknownSuite(String::new()))?;
    if !SUITES.contains(&name.as_str()) {
        return Err(CliError::UnknownSuite(name));
    }
    let cases = cfg.task.cases.unwrap_or_else(|| default_cases(&name));
    let report = run_suite(&name, cases, cfg.sampler.seed)?;
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    write_file(&out.join(format!("verify_{name}.json")), json.as_bytes())?;
    Ok(report)
}

/// Runs the estimator at each sweep value and writes `sweep.csv`.
pub fn cmd_sweep(cfg: &ExperimentConfig, estimator: Option<&str>, out: &Path) -> Result<PathBuf, CliError> {
    let name = estimator_name(cfg, estimator)?;
    let sweep = cfg.task.sweep.clone().ok_or_else(|| CliError::Unsupported("sweep needs task.sweep".into()))?;
    let parts: Result<Vec<Vec<CsvRow>>, CliError> = sweep
        .values
        .par_iter()
        .map(|&v| {
            let mut c = cfg.clone();
            match sweep.parameter {
                SweepParameter::Z => c.model.z = v,
                SweepParameter::N => c.model.n = v as u32,
                SweepParameter::Seed => c.sampler.seed = v as u64,
            }
            estimate_rows(&c, &name)
        })
        .collect();
    let rows: Vec<CsvRow> = parts?.into_iter().flatten().collect();
    let path = out.join("sweep.csv");
    write_file(&path, &csv_bytes(&rows))?;
    Ok(path)
}

pub fn print_summary(report: &SuiteReport) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(
        stdout,
        "{}: {} cases, {} failures, {} skipped, worst {} = {}",
        report.suite, report.cases, report.failures, report.skipped, report.margin_kind, report.worst_margin
    );
}
