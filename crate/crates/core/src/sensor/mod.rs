//! Depth-image rendering of posed meshes, the multiplicative/Gaussian-process
//! image noise model, grasp-to-pixel projection and rotated thumbnail
//! extraction.

mod noise;
mod render;
mod thumbnail;

pub use noise::{corrupt_depth, gp_field, NoiseModel};
pub use render::{camera_looking_at, render_depth, RenderScene};
pub use thumbnail::{bilinear_sample, extract_thumbnail, GraspThumbnail};

use std::path::Path;

use nalgebra::{Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{RigidTransform, SuctionGrasp};

/// Pinhole camera intrinsics. Pixel indices address pixel centers, so a
/// 640-wide image has its principal point near 319.5.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self {
            fx: 525.0,
            fy: 525.0,
            cx: 319.5,
            cy: 239.5,
            width: 640,
            height: 480,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> bool {
        self.fx > 0.0
            && self.fy > 0.0
            && self.cx >= 0.0
            && self.cy >= 0.0
            && (self.cx as usize) < self.width
            && (self.cy as usize) < self.height
    }

    /// Uniformly rescales the image plane (resolution and principal point).
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            fx: self.fx * s,
            fy: self.fy * s,
            cx: (self.cx + 0.5) * s - 0.5,
            cy: (self.cy + 0.5) * s - 0.5,
            width: (self.width as f64 * s).round() as usize,
            height: (self.height as f64 * s).round() as usize,
        }
    }
}

/// Row-major depth map, meters along the optical axis; 0 encodes no-return.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f32>,
}

impl DepthImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0.0; width * height],
        }
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f32 {
        self.data[v * self.width + u]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, d: f32) {
        self.data[v * self.width + u] = d;
    }

    /// Raw little-endian f32 array plus a JSON sidecar header
    /// (`<path>.json` with width, height and units).
    pub fn save_raw(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(self.data.len() * 4);
        for d in &self.data {
            bytes.extend_from_slice(&d.to_le_bytes());
        }
        std::fs::write(path, bytes).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        let header = serde_json::json!({
            "width": self.width,
            "height": self.height,
            "units": "m",
            "encoding": "f32le",
        });
        let hpath = sidecar_path(path);
        std::fs::write(&hpath, serde_json::to_vec_pretty(&header)?).map_err(|e| Error::Io {
            path: hpath.clone(),
            source: e,
        })
    }

    pub fn load_raw(path: &Path) -> Result<Self> {
        let hpath = sidecar_path(path);
        let header: serde_json::Value = serde_json::from_slice(&std::fs::read(&hpath).map_err(
            |e| Error::Io {
                path: hpath.clone(),
                source: e,
            },
        )?)?;
        let width = header["width"].as_u64().ok_or_else(|| Error::Camera("bad header".into()))?
            as usize;
        let height = header["height"]
            .as_u64()
            .ok_or_else(|| Error::Camera("bad header".into()))? as usize;
        let bytes = std::fs::read(path).map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })?;
        if bytes.len() != width * height * 4 {
            return Err(Error::Camera(format!(
                "depth file is {} bytes, expected {}",
                bytes.len(),
                width * height * 4
            )));
        }
        let data = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Self {
            width,
            height,
            data,
        })
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

/// Pixel-space description of a grasp seen by a camera.
#[derive(Debug, Clone, Copy)]
pub struct GraspProjection {
    /// Sub-pixel location of the target point.
    pub pixel: (f64, f64),
    /// Camera-frame distance to the target along the optical axis.
    pub depth: f64,
    /// Angle of the approach direction's image projection, measured from the
    /// image +v axis (down a column); rotating the image by this angle about
    /// the pixel aligns the approach with the middle column.
    pub in_plane_angle: f64,
    /// Angle between the approach direction and the table normal.
    pub table_angle: f64,
}

/// Pinhole projection of a grasp. Errors when the target is at or behind the
/// camera plane.
pub fn project_grasp(
    grasp: &SuctionGrasp,
    camera_to_world: &RigidTransform,
    intr: &CameraIntrinsics,
) -> Result<GraspProjection> {
    let cam = camera_to_world.inverse();
    let p = cam.transform_point(&grasp.point);
    if p.z <= 1e-9 {
        return Err(Error::Camera("grasp target behind camera".into()));
    }
    let v = cam.transform_vector(&grasp.approach);
    Ok(GraspProjection {
        pixel: (intr.fx * p.x / p.z + intr.cx, intr.fy * p.y / p.z + intr.cy),
        depth: p.z,
        in_plane_angle: v.x.atan2(v.y),
        table_angle: grasp
            .approach
            .dot(&Vector3::new(0.0, 0.0, -1.0))
            .clamp(-1.0, 1.0)
            .acos(),
    })
}

/// Camera-frame 3D point for a pixel at a given axial depth.
pub fn deproject(
    pixel: (f64, f64),
    depth: f64,
    camera_to_world: &RigidTransform,
    intr: &CameraIntrinsics,
) -> Point3<f64> {
    let x = (pixel.0 - intr.cx) / intr.fx * depth;
    let y = (pixel.1 - intr.cy) / intr.fy * depth;
    camera_to_world.transform_point(&Point3::new(x, y, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn on_axis_target_projects_to_principal_point() {
        let intr = CameraIntrinsics::default();
        let cam = camera_looking_at(
            Point3::new(0.0, 0.0, 0.6),
            Point3::origin(),
            Vector3::y(),
        );
        let grasp = SuctionGrasp::new(Point3::origin(), Vector3::new(0.0, 0.0, -1.0));
        let proj = project_grasp(&grasp, &cam, &intr).unwrap();
        assert_relative_eq!(proj.pixel.0, intr.cx, epsilon = 1e-9);
        assert_relative_eq!(proj.pixel.1, intr.cy, epsilon = 1e-9);
        assert_relative_eq!(proj.depth, 0.6, epsilon = 1e-12);
        // Approach along the table normal.
        assert_relative_eq!(proj.table_angle, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn deprojection_inverts_projection() {
        let intr = CameraIntrinsics::default();
        let cam = camera_looking_at(
            Point3::new(0.3, -0.2, 0.55),
            Point3::new(0.02, 0.01, 0.0),
            Vector3::y(),
        );
        let p = Point3::new(-0.03, 0.04, 0.02);
        let grasp = SuctionGrasp::new(p, Vector3::new(0.1, 0.2, -0.97).normalize());
        let proj = project_grasp(&grasp, &cam, &intr).unwrap();
        let back = deproject(proj.pixel, proj.depth, &cam, &intr);
        assert!((back - p).norm() < 1e-6, "{:?}", back);
    }

    #[test]
    fn behind_camera_errors() {
        let intr = CameraIntrinsics::default();
        let cam = camera_looking_at(
            Point3::new(0.0, 0.0, 0.6),
            Point3::origin(),
            Vector3::y(),
        );
        let grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 1.0), Vector3::new(0.0, 0.0, -1.0));
        assert!(project_grasp(&grasp, &cam, &intr).is_err());
    }

    #[test]
    fn depth_raw_round_trip() {
        let dir = std::env::temp_dir().join("vacugrasp_depth_io");
        std::fs::create_dir_all(&dir).unwrap();
        let mut img = DepthImage::new(7, 5);
        for (i, d) in img.data.iter_mut().enumerate() {
            *d = i as f32 * 0.01;
        }
        let path = dir.join("img.depth");
        img.save_raw(&path).unwrap();
        let back = DepthImage::load_raw(&path).unwrap();
        assert_eq!(img, back);
    }
}
