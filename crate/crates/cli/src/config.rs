//! Experiment configuration: a versioned TOML document with four tables.
//!
//! ```toml
//! schema_version = 1
//! [system]      # kind = rigid_body | heavy_top | so4_body | spring_pendulum
//! [solver]      # dt, t_end, scheme, seed
//! [experiment]  # subcommand settings, all optional
//! [output]      # dir, histograms
//! ```
//!
//! Unknown keys are rejected by the parser; value ranges are checked by
//! [`ExperimentConfig::validate`] and reported with the field path.

use std::path::{Path, PathBuf};

use coadjoint::algebra::{SemidirectElement, So4Element};
use coadjoint::integrators::{Scheme, SolverConfig};
use coadjoint::state::SpringPendulumState;
use coadjoint::systems::{
    isotropic_sigmas, DissipationCasimir, HeavyTopSpec, RigidBodySpec, So4BodySpec,
    SpringPendulumSpec,
};
use coadjoint::Vec3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: Box<toml::de::Error>,
    },
    #[error("{field}: {reason}")]
    Field { field: String, reason: String },
}

fn field_error(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Maps a core parameter error to a field under `system`.
fn system_error(e: coadjoint::Error) -> ConfigError {
    match e {
        coadjoint::Error::InvalidParameter { name, reason } => {
            field_error(format!("system.{name}"), reason)
        }
        other => field_error("system", other.to_string()),
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub system: SystemConfig,
    #[serde(default)]
    pub solver: SolverBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SystemConfig {
    RigidBody(RigidBodyConfig),
    HeavyTop(HeavyTopConfig),
    So4Body(So4Config),
    SpringPendulum(SpringPendulumConfig),
}

impl SystemConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            SystemConfig::RigidBody(_) => "rigid_body",
            SystemConfig::HeavyTop(_) => "heavy_top",
            SystemConfig::So4Body(_) => "so4_body",
            SystemConfig::SpringPendulum(_) => "spring_pendulum",
        }
    }
}

/// Noise given either as an isotropic amplitude or as explicit directions.
fn noise_vectors(sigma: Option<f64>, sigmas: &Option<Vec<[f64; 3]>>) -> Result<Vec<Vec3>, ConfigError> {
    match (sigma, sigmas) {
        (Some(_), Some(_)) => Err(field_error(
            "system.sigma",
            "give either sigma or sigmas, not both",
        )),
        (Some(s), None) => {
            if !(s.is_finite() && s >= 0.0) {
                return Err(field_error("system.sigma", format!("must be non-negative, got {s}")));
            }
            Ok(if s == 0.0 { vec![] } else { isotropic_sigmas(s) })
        }
        (None, Some(v)) => Ok(v.iter().map(|a| Vec3::from(*a)).collect()),
        (None, None) => Ok(vec![]),
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RigidBodyConfig {
    pub inertia: [f64; 3],
    #[serde(default)]
    pub theta: f64,
    pub sigma: Option<f64>,
    pub sigmas: Option<Vec<[f64; 3]>>,
    pub initial: [f64; 3],
}

impl RigidBodyConfig {
    pub fn build(&self) -> Result<(RigidBodySpec, Vec3), ConfigError> {
        let sigmas = noise_vectors(self.sigma, &self.sigmas)?;
        let spec = RigidBodySpec::new(Vec3::from(self.inertia), self.theta, sigmas).map_err(system_error)?;
        let x0 = Vec3::from(self.initial);
        if !(x0.norm() > 0.0 && x0.iter().all(|c| c.is_finite())) {
            return Err(field_error("system.initial", "must be finite and nonzero"));
        }
        Ok((spec, x0))
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Dissipation {
    #[default]
    PiDotGamma,
    GammaSquared,
    NoiseBalanced,
}

impl From<Dissipation> for DissipationCasimir {
    fn from(d: Dissipation) -> Self {
        match d {
            Dissipation::PiDotGamma => DissipationCasimir::PiDotGamma,
            Dissipation::GammaSquared => DissipationCasimir::GammaSquared,
            Dissipation::NoiseBalanced => DissipationCasimir::NoiseBalanced,
        }
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct HeavyTopConfig {
    pub inertia: [f64; 3],
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub g: f64,
    pub chi: [f64; 3],
    #[serde(default)]
    pub theta: f64,
    pub sigma: Option<f64>,
    pub sigmas: Option<Vec<[f64; 3]>>,
    pub etas: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub dissipation: Dissipation,
    pub initial_pi: [f64; 3],
    pub initial_gamma: [f64; 3],
}

impl HeavyTopConfig {
    pub fn build(&self) -> Result<(HeavyTopSpec, SemidirectElement), ConfigError> {
        let sigmas = noise_vectors(self.sigma, &self.sigmas)?;
        let etas = self
            .etas
            .as_ref()
            .map(|v| v.iter().map(|a| Vec3::from(*a)).collect())
            .unwrap_or_default();
        let spec = HeavyTopSpec::new(
            Vec3::from(self.inertia),
            self.m,
            self.g,
            Vec3::from(self.chi),
            self.theta,
            sigmas,
            etas,
            self.dissipation.into(),
        )
        .map_err(system_error)?;
        let gamma = Vec3::from(self.initial_gamma);
        if gamma.norm().is_nan() || gamma.norm() == 0.0 {
            return Err(field_error("system.initial_gamma", "must be nonzero"));
        }
        Ok((spec, SemidirectElement::new(Vec3::from(self.initial_pi), gamma)))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct So4Config {
    pub j: [f64; 4],
    #[serde(default)]
    pub theta: f64,
    pub sigma: Option<f64>,
    pub sigmas: Option<Vec<[f64; 6]>>,
    pub initial: [f64; 6],
}

fn so4(v: &[f64; 6]) -> So4Element {
    So4Element::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
}

impl So4Config {
    pub fn build(&self) -> Result<(So4BodySpec, So4Element), ConfigError> {
        let spec = match (self.sigma, &self.sigmas) {
            (Some(_), Some(_)) => {
                return Err(field_error("system.sigma", "give either sigma or sigmas, not both"))
            }
            (Some(s), None) => So4BodySpec::isotropic(self.j, self.theta, s),
            (None, v) => So4BodySpec::new(
                self.j,
                self.theta,
                v.iter().flatten().map(so4).collect(),
            ),
        }
        .map_err(system_error)?;
        Ok((spec, so4(&self.initial)))
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SpringPendulumConfig {
    #[serde(default = "one")]
    pub m: f64,
    #[serde(default = "one")]
    pub g: f64,
    pub k: f64,
    pub i_planar: f64,
    pub sigma: Option<f64>,
    pub sigmas: Option<Vec<[f64; 3]>>,
    pub etas: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default)]
    pub beta: f64,
    pub initial_pi: [f64; 3],
    pub initial_gamma: [f64; 3],
    pub initial_r: f64,
    #[serde(default)]
    pub initial_p: f64,
}

impl SpringPendulumConfig {
    pub fn build(&self) -> Result<(SpringPendulumSpec, SpringPendulumState), ConfigError> {
        let sigmas = noise_vectors(self.sigma, &self.sigmas)?;
        let etas = self
            .etas
            .as_ref()
            .map(|v| v.iter().map(|a| Vec3::from(*a)).collect())
            .unwrap_or_default();
        let spec = SpringPendulumSpec::new(
            self.m,
            self.g,
            self.k,
            self.i_planar,
            sigmas,
            etas,
            self.alpha,
            self.beta,
        )
        .map_err(system_error)?;
        let state = SpringPendulumState {
            pi: Vec3::from(self.initial_pi),
            gamma: Vec3::from(self.initial_gamma),
            r: self.initial_r,
            p: self.initial_p,
        };
        spec.fields(&state).map_err(|e| field_error("system.initial_r", e.to_string()))?;
        Ok((spec, state))
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SchemeName {
    #[default]
    SplitStep,
    HeunStratonovich,
    EulerMaruyama,
}

impl From<SchemeName> for Scheme {
    fn from(s: SchemeName) -> Self {
        match s {
            SchemeName::SplitStep => Scheme::SplitStep,
            SchemeName::HeunStratonovich => Scheme::HeunStratonovich,
            SchemeName::EulerMaruyama => Scheme::EulerMaruyama,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct SolverBlock {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: SchemeName,
    pub seed: u64,
}

impl Default for SolverBlock {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 10.0,
            scheme: SchemeName::SplitStep,
            seed: 0,
        }
    }
}

impl SolverBlock {
    pub fn solver(&self) -> Result<SolverConfig, ConfigError> {
        SolverConfig::new(self.dt, self.t_end, self.seed)
            .map(|s| s.with_scheme(self.scheme.into()))
            .map_err(|e| match e {
                coadjoint::Error::InvalidParameter { name, reason } => {
                    field_error(format!("solver.{name}"), reason)
                }
                other => field_error("solver", other.to_string()),
            })
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum HistogramKind {
    MomentumSphere,
    Energy,
    GammaAlongChi,
}

fn quarter_grid() -> Vec<f64> {
    (0..=4).map(|k| 0.25 * k as f64).collect()
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    /// Output every `stride` steps (simulate, lagrange-check).
    pub stride: usize,
    /// Lyapunov sweep grid.
    pub thetas: Vec<f64>,
    pub sigmas: Vec<f64>,
    /// Averaging window of each Lyapunov estimate, after burn-in.
    pub t_span: f64,
    pub realizations: usize,
    /// Ensemble size (attractor) or trajectory count (momentum histogram).
    pub members: usize,
    pub snapshot_times: Vec<f64>,
    pub n_lat: usize,
    pub n_lon: usize,
    pub kick_period: f64,
    pub amplitudes: Vec<f64>,
    pub periods: usize,
    pub burn_in_periods: usize,
    /// Defaults to momentum_sphere (θ = 0) or energy for the rigid body and
    /// gamma_along_chi for the heavy top.
    pub histogram: Option<HistogramKind>,
    pub bins: usize,
    pub oracle_draws: usize,
    pub norm_bins: usize,
    pub norm_snapshots: usize,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        Self {
            stride: 10,
            thetas: quarter_grid(),
            sigmas: quarter_grid(),
            t_span: 100.0,
            realizations: 50,
            members: 1000,
            snapshot_times: vec![0.0, 10.0, 20.0, 40.0],
            n_lat: 36,
            n_lon: 72,
            kick_period: 1.0,
            amplitudes: vec![0.1, 0.5, 1.0, 1.2, 1.5, 2.0],
            periods: 600,
            burn_in_periods: 100,
            histogram: None,
            bins: 10,
            oracle_draws: 1_000_000,
            norm_bins: 40,
            norm_snapshots: 10,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Emit sphere-histogram files next to attractor snapshots.
    pub histograms: bool,
}

impl Default for OutputBlock {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            histograms: true,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(field_error(field, format!("must be positive, got {v}")))
    }
}

fn at_least_one(field: &str, v: usize) -> Result<(), ConfigError> {
    if v >= 1 {
        Ok(())
    } else {
        Err(field_error(field, "must be at least 1"))
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { source, .. } => ConfigError::Parse {
                path: path.to_owned(),
                source,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<config>"),
            source: Box::new(e),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Range checks shared by every subcommand. Subcommands check that the
    /// system kind suits them.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(field_error(
                "schema_version",
                format!("expected {SCHEMA_VERSION}, got {}", self.schema_version),
            ));
        }
        match &self.system {
            SystemConfig::RigidBody(c) => c.build().map(drop)?,
            SystemConfig::HeavyTop(c) => c.build().map(drop)?,
            SystemConfig::So4Body(c) => c.build().map(drop)?,
            SystemConfig::SpringPendulum(c) => c.build().map(drop)?,
        }
        self.solver.solver()?;
        let e = &self.experiment;
        at_least_one("experiment.stride", e.stride)?;
        if e.thetas.is_empty() || e.sigmas.is_empty() {
            return Err(field_error("experiment.thetas", "the sweep grid must be nonempty"));
        }
        for (name, grid) in [("experiment.thetas", &e.thetas), ("experiment.sigmas", &e.sigmas)] {
            if let Some(v) = grid.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
                return Err(field_error(name, format!("entries must be non-negative, got {v}")));
            }
        }
        positive("experiment.t_span", e.t_span)?;
        at_least_one("experiment.realizations", e.realizations)?;
        at_least_one("experiment.members", e.members)?;
        if e.snapshot_times.is_empty() {
            return Err(field_error("experiment.snapshot_times", "must be nonempty"));
        }
        if e.snapshot_times.windows(2).any(|w| w[1] < w[0]) {
            return Err(field_error("experiment.snapshot_times", "must be sorted"));
        }
        if let Some(t) = e.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(field_error(
                "experiment.snapshot_times",
                format!("must be non-negative, got {t}"),
            ));
        }
        at_least_one("experiment.n_lat", e.n_lat)?;
        at_least_one("experiment.n_lon", e.n_lon)?;
        positive("experiment.kick_period", e.kick_period)?;
        if let Some(a) = e.amplitudes.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(field_error("experiment.amplitudes", format!("must be positive, got {a}")));
        }
        if e.burn_in_periods >= e.periods {
            return Err(field_error(
                "experiment.burn_in_periods",
                "must be below experiment.periods",
            ));
        }
        at_least_one("experiment.bins", e.bins)?;
        at_least_one("experiment.oracle_draws", e.oracle_draws)?;
        at_least_one("experiment.norm_bins", e.norm_bins)?;
        at_least_one("experiment.norm_snapshots", e.norm_snapshots)?;
        Ok(())
    }

    /// Canonical TOML of the effective configuration; hashed into the
    /// manifest.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Snapshot times must fall inside the integration window.
    pub fn check_snapshot_window(&self) -> Result<(), ConfigError> {
        match self
            .experiment
            .snapshot_times
            .iter()
            .find(|t| **t > self.solver.t_end)
        {
            Some(t) => Err(field_error(
                "experiment.snapshot_times",
                format!("{t} is beyond solver.t_end = {}", self.solver.t_end),
            )),
            None => Ok(()),
        }
    }

    pub fn wrong_kind(&self, command: &str, expected: &str) -> ConfigError {
        field_error(
            "system.kind",
            format!("{command} needs {expected}, got {}", self.system.kind()),
        )
    }
}
