use nalgebra::{Matrix3, Point3, Vector3};
use rayon::prelude::*;

use super::{CameraIntrinsics, DepthImage};
use crate::geometry::{Bvh, RigidTransform};

/// Camera-to-world pose looking from `eye` toward `target`. Camera axes:
/// x right, y down, z forward (optical axis). `up_hint` disambiguates roll;
/// pass world +z for the usual overhead views.
pub fn camera_looking_at(
    eye: Point3<f64>,
    target: Point3<f64>,
    up_hint: Vector3<f64>,
) -> RigidTransform {
    let z = (target - eye).normalize();
    let mut x = up_hint.cross(&z);
    if x.norm() < 1e-9 {
        // Optical axis parallel to the hint: fall back to world x.
        x = if z.x.abs() < 0.9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        x = (x - x.dot(&z) * z).normalize();
    } else {
        x = x.normalize();
    }
    let y = z.cross(&x);
    RigidTransform::new(Matrix3::from_columns(&[x, y, z]), eye.coords)
}

/// What a render sees: a mesh BVH (already posed in world coordinates) plus
/// an optional table plane at a fixed z rendered as background geometry.
pub struct RenderScene<'a> {
    pub bvh: &'a Bvh,
    pub table_z: Option<f64>,
}

/// Per-pixel nearest-hit depth along the optical axis. Parallelized over
/// rows; rays through pixel centers.
pub fn render_depth(
    scene: &RenderScene,
    camera_to_world: &RigidTransform,
    intr: &CameraIntrinsics,
) -> DepthImage {
    let mut img = DepthImage::new(intr.width, intr.height);
    let origin = Point3::from(camera_to_world.translation);
    let rot = camera_to_world.rotation;
    let axis = rot.column(2).into_owned();

    img.data
        .par_chunks_mut(intr.width)
        .enumerate()
        .for_each(|(v, row)| {
            for (u, out) in row.iter_mut().enumerate() {
                let dir_cam = Vector3::new(
                    (u as f64 - intr.cx) / intr.fx,
                    (v as f64 - intr.cy) / intr.fy,
                    1.0,
                );
                let dir = (rot * dir_cam).normalize();
                let cos_axis = dir.dot(&axis);
                let mut t_best = f64::INFINITY;
                if let Some(hit) = scene.bvh.ray_intersect(&origin, &dir) {
                    t_best = hit.distance;
                }
                if let Some(zt) = scene.table_z {
                    if dir.z < -1e-12 {
                        let t = (zt - origin.z) / dir.z;
                        if t > 0.0 && t < t_best {
                            t_best = t;
                        }
                    }
                }
                *out = if t_best.is_finite() {
                    (t_best * cos_axis) as f32
                } else {
                    0.0
                };
            }
        });
    img
}
