//! Run configuration: one TOML file covering every module's knobs. Unknown
//! keys are rejected so typos fail loudly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::contact::RingContactModel;
use crate::error::{Error, Result};
use crate::metrics::{CandidateConstraints, CemConfig, MetricParams};
use crate::robustness::PerturbationSpec;
use crate::seal::{CupModel, SealParams};
use crate::sensor::{CameraIntrinsics, NoiseModel};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CupConfig {
    pub n: usize,
    pub radius_m: f64,
    pub height_m: f64,
    pub strain_limit: f64,
}

impl Default for CupConfig {
    fn default() -> Self {
        let m = CupModel::default();
        Self {
            n: m.vertex_count,
            radius_m: m.radius,
            height_m: m.height,
            strain_limit: m.strain_limit,
        }
    }
}

impl CupConfig {
    pub fn to_model(self) -> CupModel {
        CupModel {
            vertex_count: self.n,
            radius: self.radius_m,
            height: self.height_m,
            strain_limit: self.strain_limit,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SealConfig {
    pub samples_per_spring: usize,
    pub hole_grid: usize,
    pub collision_steps: usize,
}

impl Default for SealConfig {
    fn default() -> Self {
        let p = SealParams::default();
        Self {
            samples_per_spring: p.samples_per_spring,
            hole_grid: p.hole_grid,
            collision_steps: p.collision_steps,
        }
    }
}

impl SealConfig {
    pub fn to_params(self) -> SealParams {
        SealParams {
            samples_per_spring: self.samples_per_spring,
            hole_grid: self.hole_grid,
            collision_steps: self.collision_steps,
            ring_axis: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContactModelKind {
    Ring,
    SoftFinger,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ContactConfig {
    pub model: ContactModelKind,
    pub mu: f64,
    pub kappa: f64,
    pub vacuum_force_n: f64,
    /// Torsion bound per unit normal force for the soft-finger model, meters.
    pub soft_finger_gamma: f64,
    /// Residual tolerance in the torque-scaled metric, N^2.
    pub resistance_tol: f64,
}

impl Default for ContactConfig {
    fn default() -> Self {
        Self {
            model: ContactModelKind::Ring,
            mu: 0.5,
            kappa: 0.005,
            vacuum_force_n: 250.0,
            soft_finger_gamma: 0.005,
            resistance_tol: crate::contact::RESISTANCE_TOL,
        }
    }
}

impl ContactConfig {
    pub fn ring_model(&self, cup_radius: f64) -> RingContactModel {
        RingContactModel::new(cup_radius, self.mu, self.kappa, self.vacuum_force_n)
    }

    pub fn resistance_model(&self) -> crate::robustness::ResistanceModel {
        match self.model {
            ContactModelKind::Ring => crate::robustness::ResistanceModel::Ring,
            ContactModelKind::SoftFinger => crate::robustness::ResistanceModel::SoftFinger {
                gamma: self.soft_finger_gamma,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    /// Depth images rendered per stable pose.
    pub images_per_pose: usize,
    /// Grasp candidates precomputed per object.
    pub grasps_per_object: usize,
    /// Most-probable stable poses kept per object.
    pub max_poses_per_object: usize,
    pub shard_size: usize,
    pub thumbnail_px: usize,
    /// Planar pose bound: offsets uniform on [-b, b]^2, rotation on [0, 2pi).
    pub planar_offset: f64,
    pub camera_radial: [f64; 2],
    pub camera_polar: [f64; 2],
    /// A grasp is visible in an image when the rendered depth at its pixel
    /// matches its camera-frame depth within this many meters.
    pub visibility_depth_tol: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            images_per_pose: 10,
            grasps_per_object: 250,
            max_poses_per_object: 5,
            shard_size: 1024,
            thumbnail_px: 32,
            planar_offset: 0.1,
            camera_radial: [0.5, 0.7],
            camera_polar: [0.01 * std::f64::consts::PI, 0.1 * std::f64::consts::PI],
            visibility_depth_tol: 0.005,
        }
    }
}

impl DatasetConfig {
    /// Supplement-style camera bounds (the main-text bounds are the default).
    pub fn with_supplement_camera(mut self) -> Self {
        self.camera_radial = [0.65, 0.75];
        self.camera_polar = [0.05 * std::f64::consts::PI, 0.1 * std::f64::consts::PI];
        self
    }
}

/// Every module's configuration plus the global seed.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub log_level: LogLevel,
    pub cup: CupConfig,
    pub seal: SealConfig,
    pub contact: ContactConfig,
    pub perturbation: PerturbationSpec,
    pub camera: CameraIntrinsics,
    pub sensor: NoiseModel,
    pub metrics: MetricParams,
    pub planner: CandidateConstraints,
    pub cem: CemConfig,
    pub dataset: DatasetConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogLevel {
    Quiet,
    #[default]
    Info,
    Debug,
}

impl RunConfig {
    /// Parses and validates a TOML config; parse errors carry line numbers.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.cup.to_model().validate() {
            return Err(Error::Config(
                "cup: need n >= 3, radius > 0, height > 0, strain limit in (0, 1)".into(),
            ));
        }
        if !self.perturbation.validate() {
            return Err(Error::Config(
                "perturbation: stds must be nonnegative, samples >= 1, threshold in [0, 1]".into(),
            ));
        }
        if !self.camera.validate() {
            return Err(Error::Config("camera: bad intrinsics".into()));
        }
        if self.contact.mu < 0.0 || self.contact.kappa < 0.0 || self.contact.vacuum_force_n <= 0.0
        {
            return Err(Error::Config("contact: mu, kappa >= 0 and V > 0".into()));
        }
        if self.dataset.shard_size == 0 || self.dataset.thumbnail_px == 0 {
            return Err(Error::Config("dataset: zero shard or thumbnail size".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}
