//! TOML run configuration.
//!
//! Every table rejects keys it does not know, and every field has a default
//! except the initial condition, which must list at least one Gaussian.

use std::path::{Path, PathBuf};

use landau_core::integrator::{
    DgKind, DiscreteGradientKind, KrylovSettings, PathKind, SolverKind, StepConfig,
};
use landau_core::thermo::{ModelKind, ThermoModel, DEFAULT_CEILING, DEFAULT_FLOOR};
use landau_core::DiscretizationConfig;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("invalid value for {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshSection {
    pub v_max: f64,
    pub n_cells: usize,
    pub degree: usize,
    pub quad_order: usize,
    pub track_energy: bool,
}

impl Default for MeshSection {
    fn default() -> Self {
        let d = DiscretizationConfig::default();
        Self {
            v_max: d.v_max,
            n_cells: d.n_cells,
            degree: d.degree,
            quad_order: d.quad_order,
            track_energy: d.track_energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelName {
    MaxwellBoltzmann,
    FermiDirac,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermoSection {
    pub model: ModelName,
    pub f_floor: f64,
    pub f_ceiling: f64,
    pub clamp_mobility: bool,
}

impl Default for ThermoSection {
    fn default() -> Self {
        Self {
            model: ModelName::MaxwellBoltzmann,
            f_floor: DEFAULT_FLOOR,
            f_ceiling: DEFAULT_CEILING,
            clamp_mobility: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DgName {
    Gonzalez,
    Average,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverName {
    Picard,
    NewtonKrylov,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathName {
    Dense,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub dt: f64,
    pub n_steps: usize,
    pub discrete_gradient: DgName,
    pub solver: SolverName,
    pub path: PathName,
    pub picard_tol: f64,
    pub picard_max_iters: usize,
    /// Retry a failed Picard solve with Newton–Krylov.
    pub newton_fallback: bool,
    pub krylov_restart: usize,
    pub krylov_tol: f64,
    pub krylov_max_iters: usize,
    pub newton_max_iters: usize,
    pub fd_step: f64,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let s = StepConfig::default();
        Self {
            dt: s.dt,
            n_steps: 10,
            discrete_gradient: DgName::Gonzalez,
            solver: SolverName::Picard,
            path: PathName::Sparse,
            picard_tol: s.picard_tol,
            picard_max_iters: s.picard_max_iters,
            newton_fallback: s.newton_fallback,
            krylov_restart: s.krylov.restart,
            krylov_tol: s.krylov.inner_tol,
            krylov_max_iters: s.krylov.max_inner_iters,
            newton_max_iters: s.krylov.max_newton_iters,
            fd_step: s.krylov.fd_step,
        }
    }
}

/// One term `weight exp(-|v - center|^2 / (2 T)) / (2 pi T)`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub weight: f64,
    pub center: [f64; 2],
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub directory: PathBuf,
    /// Write a snapshot every this many steps; 0 keeps only the last one.
    pub snapshot_stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("output"),
            snapshot_stride: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mesh: MeshSection,
    #[serde(default)]
    pub thermo: ThermoSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub initial_condition: Vec<GaussianComponent>,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str, origin: &Path) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.mesh;
        if !(m.v_max.is_finite() && m.v_max > 0.0) {
            return Err(invalid(
                "mesh.v_max",
                format!("must be positive, got {}", m.v_max),
            ));
        }
        if m.n_cells == 0 {
            return Err(invalid("mesh.n_cells", "must be at least 1"));
        }
        if m.degree == 0 {
            return Err(invalid("mesh.degree", "must be at least 1"));
        }
        if m.quad_order == 0 {
            return Err(invalid("mesh.quad_order", "must be at least 1"));
        }

        let t = &self.thermo;
        if !(t.f_floor > 0.0 && t.f_floor < 1.0) {
            return Err(invalid(
                "thermo.f_floor",
                format!("must lie in (0, 1), got {}", t.f_floor),
            ));
        }
        if t.model == ModelName::FermiDirac && !(t.f_ceiling > t.f_floor && t.f_ceiling < 1.0) {
            return Err(invalid(
                "thermo.f_ceiling",
                format!("must lie in (f_floor, 1), got {}", t.f_ceiling),
            ));
        }

        let i = &self.integrator;
        if !(i.dt.is_finite() && i.dt > 0.0) {
            return Err(invalid(
                "integrator.dt",
                format!("must be positive, got {}", i.dt),
            ));
        }
        if i.n_steps == 0 {
            return Err(invalid("integrator.n_steps", "must be at least 1"));
        }
        for (name, v) in [
            ("integrator.picard_tol", i.picard_tol),
            ("integrator.krylov_tol", i.krylov_tol),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(invalid(name, format!("must lie in (0, 1), got {v}")));
            }
        }
        if !(i.fd_step > 0.0 && i.fd_step < 1.0) {
            return Err(invalid(
                "integrator.fd_step",
                format!("must lie in (0, 1), got {}", i.fd_step),
            ));
        }
        for (name, v) in [
            ("integrator.picard_max_iters", i.picard_max_iters),
            ("integrator.krylov_restart", i.krylov_restart),
            ("integrator.krylov_max_iters", i.krylov_max_iters),
            ("integrator.newton_max_iters", i.newton_max_iters),
        ] {
            if v == 0 {
                return Err(invalid(name, "must be at least 1"));
            }
        }
        if i.path == PathName::Sparse
            && (t.clamp_mobility || t.model != ModelName::MaxwellBoltzmann)
        {
            return Err(invalid(
                "integrator.path",
                "the sparse path needs the unclamped Maxwell–Boltzmann mobility; use path = \"dense\"",
            ));
        }

        if self.initial_condition.is_empty() {
            return Err(invalid(
                "initial_condition",
                "at least one [[initial_condition]] Gaussian component is required",
            ));
        }
        for (k, c) in self.initial_condition.iter().enumerate() {
            if !(c.temperature.is_finite() && c.temperature > 0.0) {
                return Err(invalid(
                    &format!("initial_condition[{k}].temperature"),
                    format!("must be positive, got {}", c.temperature),
                ));
            }
            // A zero weight is allowed and contributes nothing.
            if !(c.weight.is_finite() && c.weight >= 0.0) {
                return Err(invalid(
                    &format!("initial_condition[{k}].weight"),
                    format!("must be nonnegative, got {}", c.weight),
                ));
            }
            if !c.center.iter().all(|x| x.is_finite()) {
                return Err(invalid(
                    &format!("initial_condition[{k}].center"),
                    "must be finite",
                ));
            }
        }
        Ok(())
    }

    pub fn discretization(&self) -> DiscretizationConfig {
        DiscretizationConfig {
            v_max: self.mesh.v_max,
            n_cells: self.mesh.n_cells,
            degree: self.mesh.degree,
            quad_order: self.mesh.quad_order,
            track_energy: self.mesh.track_energy,
        }
    }

    pub fn model(&self) -> ThermoModel {
        ThermoModel {
            kind: match self.thermo.model {
                ModelName::MaxwellBoltzmann => ModelKind::MaxwellBoltzmann,
                ModelName::FermiDirac => ModelKind::FermiDirac,
            },
            f_floor: self.thermo.f_floor,
            f_ceiling: self.thermo.f_ceiling,
            clamp_mobility: self.thermo.clamp_mobility,
        }
    }

    pub fn step_config(&self) -> StepConfig {
        let i = &self.integrator;
        StepConfig {
            dt: i.dt,
            solver: match i.solver {
                SolverName::Picard => SolverKind::Picard,
                SolverName::NewtonKrylov => SolverKind::NewtonKrylov,
            },
            picard_tol: i.picard_tol,
            picard_max_iters: i.picard_max_iters,
            krylov: KrylovSettings {
                restart: i.krylov_restart,
                inner_tol: i.krylov_tol,
                max_inner_iters: i.krylov_max_iters,
                max_newton_iters: i.newton_max_iters,
                fd_step: i.fd_step,
            },
            path: match i.path {
                PathName::Dense => PathKind::Dense,
                PathName::Sparse => PathKind::Sparse,
            },
            newton_fallback: i.newton_fallback,
        }
    }

    pub fn discrete_gradient(&self) -> DiscreteGradientKind {
        let kind = match self.integrator.discrete_gradient {
            DgName::Gonzalez => DgKind::GonzalezMidpoint,
            DgName::Average => DgKind::Average,
        };
        DiscreteGradientKind {
            kind,
            ..DiscreteGradientKind::gonzalez()
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    RunConfig::from_toml_str(&text, path)
}
