use nalgebra::{Point3, Unit, Vector3};
use rand::Rng;

use crate::config::DatasetConfig;
use crate::geometry::RigidTransform;
use crate::robustness::PerturbationSpec;
use crate::sensor::camera_looking_at;

/// One draw from the state distribution: object and stable pose indices, the
/// friction coefficient, the planar pose on the table, and the camera's
/// spherical coordinates (optical axis through the table center).
#[derive(Debug, Clone, Copy)]
pub struct StateSample {
    pub object: usize,
    pub stable_pose: usize,
    pub friction: f64,
    /// Planar offset (x, y) and rotation about z.
    pub planar: (f64, f64, f64),
    pub camera_radius: f64,
    pub camera_azimuth: f64,
    pub camera_polar: f64,
}

/// Draws the per-image state factors: friction from the truncated Gaussian,
/// planar pose uniform on its box, camera uniform in spherical bounds.
/// Object and pose indices are supplied by the pipeline's task structure.
pub fn sample_state(
    object: usize,
    stable_pose: usize,
    cfg: &DatasetConfig,
    pert: &PerturbationSpec,
    rng: &mut impl Rng,
) -> StateSample {
    let mut spec = *pert;
    spec.samples = 1;
    let friction = crate::robustness::sample_perturbation(&spec, rng).friction;
    let planar = (
        rng.random_range(-cfg.planar_offset..=cfg.planar_offset),
        rng.random_range(-cfg.planar_offset..=cfg.planar_offset),
        rng.random_range(0.0..std::f64::consts::TAU),
    );
    StateSample {
        object,
        stable_pose,
        friction,
        planar,
        camera_radius: rng.random_range(cfg.camera_radial[0]..=cfg.camera_radial[1]),
        camera_azimuth: rng.random_range(0.0..std::f64::consts::TAU),
        camera_polar: rng.random_range(cfg.camera_polar[0]..=cfg.camera_polar[1]),
    }
}

/// Planar table offset as a rigid transform.
pub fn planar_transform(planar: (f64, f64, f64)) -> RigidTransform {
    let mut t = RigidTransform::rotation_about(Unit::new_unchecked(Vector3::z()), planar.2);
    t.translation = Vector3::new(planar.0, planar.1, 0.0);
    t
}

/// Camera-to-world pose for a state: eye on the view sphere, optical axis
/// through the table center. Composing with the inverse planar offset lets
/// the renderer keep the object in its canonical stable pose.
pub fn camera_pose_for(state: &StateSample) -> RigidTransform {
    let eye = Point3::new(
        state.camera_radius * state.camera_polar.sin() * state.camera_azimuth.cos(),
        state.camera_radius * state.camera_polar.sin() * state.camera_azimuth.sin(),
        state.camera_radius * state.camera_polar.cos(),
    );
    camera_looking_at(eye, Point3::origin(), Vector3::z())
}
