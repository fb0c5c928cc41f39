use super::{DepthImage, GraspProjection};

/// Target-centered depth crop, rotated so the approach axis runs down the
/// middle column: one training datapoint's image part.
#[derive(Debug, Clone)]
pub struct GraspThumbnail {
    /// Square crop, side `crop.width` pixels.
    pub crop: DepthImage,
    /// Camera-frame distance to the target, meters.
    pub gripper_depth: f64,
    /// Angle between the approach direction and the table normal, radians.
    pub approach_angle: f64,
    /// Source pixel the crop is centered on.
    pub source_pixel: (f64, f64),
    /// In-plane rotation applied, radians.
    pub rotation: f64,
}

/// Bilinear sample with zero (no-return) padding outside the image.
pub fn bilinear_sample(img: &DepthImage, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let fx = x - x0;
    let fy = y - y0;
    let mut acc = 0.0;
    for (dx, wx) in [(0i64, 1.0 - fx), (1, fx)] {
        for (dy, wy) in [(0i64, 1.0 - fy), (1, fy)] {
            let u = x0 as i64 + dx;
            let v = y0 as i64 + dy;
            let val = if u >= 0 && v >= 0 && (u as usize) < img.width && (v as usize) < img.height
            {
                img.get(u as usize, v as usize) as f64
            } else {
                0.0
            };
            acc += wx * wy * val;
        }
    }
    acc
}

/// Rotates about the target pixel by the in-plane approach angle, then
/// center-crops `side x side` with bilinear resampling; windows past the
/// image bounds pad with no-return.
pub fn extract_thumbnail(
    img: &DepthImage,
    projection: &GraspProjection,
    side: usize,
) -> GraspThumbnail {
    let theta = projection.in_plane_angle;
    let (sin_t, cos_t) = theta.sin_cos();
    let center = (side as f64 - 1.0) / 2.0;
    let mut crop = DepthImage::new(side, side);
    for j in 0..side {
        for i in 0..side {
            let cx = i as f64 - center;
            let cy = j as f64 - center;
            // Crop +y (down the middle column) maps to the approach direction
            // in the source image.
            let sx = projection.pixel.0 + cos_t * cx + sin_t * cy;
            let sy = projection.pixel.1 - sin_t * cx + cos_t * cy;
            crop.set(i, j, bilinear_sample(img, sx, sy) as f32);
        }
    }
    GraspThumbnail {
        crop,
        gripper_depth: projection.depth,
        approach_angle: projection.table_angle,
        source_pixel: projection.pixel,
        rotation: theta,
    }
}
