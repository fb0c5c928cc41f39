//! Grasp candidate sources: segmented depth-image clouds with window-fit
//! normals, and mesh surface samples.

use nalgebra::{Point3, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quality::fit_plane;
use crate::error::{Error, Result};
use crate::geometry::{sample_surface, Mesh, SuctionGrasp};
use crate::sensor::{deproject, CameraIntrinsics, DepthImage};
use crate::geometry::RigidTransform;

/// Constraints on admissible grasps: workspace segmentation bounds and the
/// kinematic approach cone about vertical.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CandidateConstraints {
    pub workspace_min: [f64; 3],
    pub workspace_max: [f64; 3],
    /// Maximum angle between the approach and straight-down, radians.
    pub max_approach_angle: f64,
}

impl Default for CandidateConstraints {
    fn default() -> Self {
        Self {
            workspace_min: [-0.2, -0.2, 1e-3],
            workspace_max: [0.2, 0.2, 0.5],
            max_approach_angle: 45f64.to_radians(),
        }
    }
}

impl CandidateConstraints {
    pub fn contains(&self, p: &Point3<f64>) -> bool {
        (0..3).all(|k| p[k] >= self.workspace_min[k] && p[k] <= self.workspace_max[k])
    }

    pub fn approach_ok(&self, v: &Vector3<f64>) -> bool {
        let angle = v.dot(&Vector3::new(0.0, 0.0, -1.0)).clamp(-1.0, 1.0).acos();
        // The slack covers normal tilt from f32 depth quantization, so a
        // zero-degree cone still admits flat-face normals.
        angle <= self.max_approach_angle + 1e-4
    }

    pub fn admits(&self, g: &SuctionGrasp) -> bool {
        self.contains(&g.point) && self.approach_ok(&g.approach)
    }
}

/// Surface points with inward approach directions, the raw material for
/// candidate sampling and CEM re-anchoring.
#[derive(Debug, Clone, Default)]
pub struct SurfaceCloud {
    pub grasps: Vec<SuctionGrasp>,
}

impl SurfaceCloud {
    pub fn is_empty(&self) -> bool {
        self.grasps.is_empty()
    }

    pub fn nearest(&self, p: &Point3<f64>) -> Option<&SuctionGrasp> {
        self.grasps
            .iter()
            .min_by(|a, b| {
                (a.point - p)
                    .norm_squared()
                    .partial_cmp(&(b.point - p).norm_squared())
                    .unwrap()
            })
    }

    /// Uniform candidate draw of up to `count` grasps.
    pub fn sample(&self, count: usize, rng: &mut impl Rng) -> Vec<SuctionGrasp> {
        (0..count)
            .map(|_| self.grasps[rng.random_range(0..self.grasps.len())])
            .collect()
    }
}

/// Foreground surface cloud from a depth image: pixels whose deprojection
/// falls inside the workspace bounds, with normals from a k x k window plane
/// fit and approaches rejected outside the kinematic cone.
pub fn cloud_from_depth(
    img: &DepthImage,
    camera_to_world: &RigidTransform,
    intr: &CameraIntrinsics,
    constraints: &CandidateConstraints,
    normal_window: usize,
) -> Result<SurfaceCloud> {
    let k = normal_window.max(3) | 1; // odd
    let half = (k / 2) as i64;
    let eye = Point3::from(camera_to_world.translation);
    let mut grasps = Vec::new();
    for v in 0..img.height {
        for u in 0..img.width {
            let d = img.get(u, v) as f64;
            if d <= 0.0 {
                continue;
            }
            let p = deproject((u as f64, v as f64), d, camera_to_world, intr);
            if !constraints.contains(&p) {
                continue;
            }
            let mut window = Vec::with_capacity(k * k);
            for dv in -half..=half {
                for du in -half..=half {
                    let uu = u as i64 + du;
                    let vv = v as i64 + dv;
                    if uu < 0 || vv < 0 || uu >= img.width as i64 || vv >= img.height as i64 {
                        continue;
                    }
                    let dd = img.get(uu as usize, vv as usize) as f64;
                    if dd <= 0.0 {
                        continue;
                    }
                    window.push(deproject((uu as f64, vv as f64), dd, camera_to_world, intr));
                }
            }
            let Some((_, mut normal, _)) = fit_plane(&window) else {
                continue;
            };
            // Orient toward the camera (the visible side), approach inward.
            if normal.dot(&(eye - p)) < 0.0 {
                normal = -normal;
            }
            let grasp = SuctionGrasp::new(p, -normal);
            if constraints.approach_ok(&grasp.approach) {
                grasps.push(grasp);
            }
        }
    }
    if grasps.is_empty() {
        return Err(Error::EmptyCandidates(
            "no foreground points inside the workspace".into(),
        ));
    }
    Ok(SurfaceCloud { grasps })
}

/// Surface cloud sampled directly from mesh geometry.
pub fn cloud_from_mesh(
    mesh: &Mesh,
    count: usize,
    constraints: &CandidateConstraints,
    rng: &mut impl Rng,
) -> Result<SurfaceCloud> {
    let raw = sample_surface(mesh, count, rng)?;
    let grasps: Vec<SuctionGrasp> = raw.into_iter().filter(|g| constraints.admits(g)).collect();
    if grasps.is_empty() {
        return Err(Error::EmptyCandidates(
            "no surface samples satisfied the constraints".into(),
        ));
    }
    Ok(SurfaceCloud { grasps })
}
