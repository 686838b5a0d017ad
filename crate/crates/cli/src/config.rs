//! Strict JSON experiment configuration.

use std::path::{Path, PathBuf};

use delaunay_gibbs::estimators::PressureGrid;
use delaunay_gibbs::interaction::TrianglePotential;
use delaunay_gibbs::SamplerConfig;
use serde::{Deserialize, Serialize};

pub const MAX_LEVEL: u32 = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub sampler: SamplerConfig,
    #[serde(default)]
    pub task: TaskConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub z: f64,
    pub potential: TrianglePotential,
    /// Window level: `Λ_n = [−n−½, n+½]²`.
    pub n: u32,
    pub boundary: BoundaryConfig,
    /// Number of colours for marked models.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u8>,
    /// Hard-core radius.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Periodic,
    /// Outside data read from a snapshot file with a `window` header;
    /// relative paths are resolved against the config file.
    Configurational { outside: PathBuf },
    /// Outside data drawn from a Poisson process of the given intensity on
    /// `Λ_n` expanded by `margin`, from the sampler seed.
    PoissonOutside { intensity: f64, margin: f64 },
}

fn is_default<T: Default + PartialEq>(v: &T) -> bool {
    *v == T::default()
}

/// Subcommand parameters; every field has a default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<String>,
    /// Verification case count; the suite default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cases: Option<usize>,
    /// Window levels for `boundary_ratio` and `vacuum`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<u32>>,
    /// Thermodynamic-integration grid for `pressure`, `variational` and
    /// `vacuum`.
    #[serde(default, skip_serializing_if = "is_default")]
    pub grid: GridConfig,
    /// Candidate activities for `variational`; 16 log-spaced values on
    /// `[z/4, 2z]` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<f64>>,
    /// Poisson draws per candidate activity.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub draws: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub points: usize,
    pub lower: f64,
    pub stub_draws: usize,
    pub tolerance: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        let g = PressureGrid::default();
        GridConfig { points: g.points, lower: g.lower, stub_draws: g.stub_draws, tolerance: g.tolerance }
    }
}

impl From<&GridConfig> for PressureGrid {
    fn from(g: &GridConfig) -> PressureGrid {
        PressureGrid { points: g.points, lower: g.lower, stub_draws: g.stub_draws, tolerance: g.tolerance }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    Z,
    N,
    Seed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Range(String),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<ExperimentConfig, ConfigError> {
        let c: ExperimentConfig = serde_json::from_str(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.into(), source })?;
        let mut c = ExperimentConfig::from_json(&text)?;
        if let BoundaryConfig::Configurational { outside } = &mut c.model.boundary {
            if outside.is_relative() {
                *outside = path.parent().unwrap_or(Path::new(".")).join(&*outside);
            }
        }
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let range = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(ConfigError::Range(msg.into())) };
        let m = &self.model;
        range(m.z.is_finite() && m.z > 0.0, "model.z must be positive")?;
        range((1..=MAX_LEVEL).contains(&m.n), "model.n must be in 1..=64")?;
        if let Some(r0) = m.r0 {
            range(r0.is_finite() && r0 >= 0.0, "model.r0 must be nonnegative")?;
        }
        range(m.q != Some(0), "model.q must be positive")?;
        if let BoundaryConfig::PoissonOutside { intensity, margin } = m.boundary {
            range(intensity.is_finite() && intensity >= 0.0, "boundary intensity must be nonnegative")?;
            range(margin.is_finite() && margin > 0.0, "boundary margin must be positive")?;
        }
        self.sampler.validate().map_err(|e| ConfigError::Range(e.to_string()))?;
        let t = &self.task;
        if let Some(levels) = &t.levels {
            range(!levels.is_empty(), "task.levels must not be empty")?;
            range(levels.iter().all(|n| (1..=MAX_LEVEL).contains(n)), "task.levels must be in 1..=64")?;
        }
        let g = &t.grid;
        range(g.points >= 2 && g.lower > 0.0 && g.lower < 1.0 && g.stub_draws > 0, "task.grid out of range")?;
        range(g.tolerance.is_finite() && g.tolerance > 0.0, "task.grid.tolerance must be positive")?;
        if let Some(c) = &t.candidates {
            range(!c.is_empty() && c.iter().all(|u| u.is_finite() && *u > 0.0), "task.candidates must be positive")?;
        }
        range(t.draws != Some(0) && t.cases != Some(0), "task.draws and task.cases must be positive")?;
        if let Some(s) = &t.sweep {
            range(!s.values.is_empty(), "task.sweep.values must not be empty")?;
            let ok = match s.parameter {
                SweepParameter::Z => s.values.iter().all(|v| v.is_finite() && *v > 0.0),
                SweepParameter::N => s.values.iter().all(|v| v.fract() == 0.0 && *v >= 1.0 && *v <= MAX_LEVEL as f64),
                SweepParameter::Seed => s.values.iter().all(|v| v.fract() == 0.0 && *v >= 0.0),
            };
            range(ok, "task.sweep.values out of range for the parameter")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"{
        "model": {"z": 1.5, "potential": {"kind": "truncated", "inner": {"kind": "phi1", "beta": 1.0}, "r": 2.0, "k": 1.0},
                  "n": 3, "boundary": {"kind": "poisson_outside", "intensity": 1.0, "margin": 10.0}, "r0": 0.05},
        "sampler": {"seed": 4, "sweeps": 100, "burn_in": 10, "thin": 2},
        "task": {"estimator": "vacuum", "levels": [2, 3], "grid": {"points": 8, "lower": 0.05, "stub_draws": 100, "tolerance": 1.0},
                 "sweep": {"parameter": "z", "values": [0.5, 1.0]}},
        "output": {"dir": "results"}
    }"#;

    #[test]
    fn round_trip() {
        let c = ExperimentConfig::from_json(FULL).unwrap();
        let again = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(c, again);
        let minimal = r#"{"model": {"z": 1, "potential": {"kind": "constant", "value": 0}, "n": 2, "boundary": {"kind": "periodic"}},
                          "sampler": {"seed": 1, "sweeps": 10, "burn_in": 0, "thin": 1}}"#;
        let m = ExperimentConfig::from_json(minimal).unwrap();
        assert_eq!(ExperimentConfig::from_json(&m.to_json()).unwrap(), m);
        assert_eq!(m.task, TaskConfig::default());
    }

    #[test]
    fn strict_schema_and_ranges() {
        let unknown = FULL.replace("\"thin\": 2", "\"thin\": 2, \"extra\": 1");
        assert!(matches!(ExperimentConfig::from_json(&unknown), Err(ConfigError::Parse(_))));
        let bad_z = FULL.replace("\"z\": 1.5", "\"z\": -1");
        assert!(matches!(ExperimentConfig::from_json(&bad_z), Err(ConfigError::Range(_))));
        let bad_n = FULL.replace("\"n\": 3", "\"n\": 0");
        assert!(matches!(ExperimentConfig::from_json(&bad_n), Err(ConfigError::Range(_))));
        let bad_thin = FULL.replace("\"thin\": 2", "\"thin\": 0");
        assert!(ExperimentConfig::from_json(&bad_thin).is_err());
    }
}
