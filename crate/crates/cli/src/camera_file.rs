//! JSON camera description consumed by `plan` and produced by `render`:
//! intrinsics plus a 4x4 row-major camera-to-world matrix.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};
use vacugrasp_core::geometry::RigidTransform;
use vacugrasp_core::CameraIntrinsics;

#[derive(Debug, Serialize, Deserialize)]
pub struct CameraFile {
    pub intrinsics: CameraIntrinsics,
    /// Row-major 4x4 camera-to-world transform.
    pub camera_to_world: [[f64; 4]; 4],
}

impl CameraFile {
    pub fn new(intrinsics: CameraIntrinsics, pose: &RigidTransform) -> Self {
        let mut m = [[0.0; 4]; 4];
        for (r, row) in m.iter_mut().take(3).enumerate() {
            for (c, slot) in row.iter_mut().take(3).enumerate() {
                *slot = pose.rotation[(r, c)];
            }
            row[3] = pose.translation[r];
        }
        m[3][3] = 1.0;
        Self {
            intrinsics,
            camera_to_world: m,
        }
    }

    pub fn pose(&self) -> Result<RigidTransform> {
        let m = &self.camera_to_world;
        let rotation = Matrix3::from_rows(&[
            nalgebra::RowVector3::new(m[0][0], m[0][1], m[0][2]),
            nalgebra::RowVector3::new(m[1][0], m[1][1], m[1][2]),
            nalgebra::RowVector3::new(m[2][0], m[2][1], m[2][2]),
        ]);
        let t = RigidTransform {
            rotation,
            translation: Vector3::new(m[0][3], m[1][3], m[2][3]),
        };
        if !t.is_valid(1e-6) {
            bail!("camera_to_world rotation is not orthonormal");
        }
        Ok(t)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_vec_pretty(self)?)
            .with_context(|| format!("writing {}", path.display()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes =
            std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        Ok(serde_json::from_slice(&bytes)?)
    }
}
