use nalgebra::{Point3, Vector3};
use rand::Rng;

use super::mesh::Mesh;
use crate::error::{Error, Result};

/// A surface point with an inward unit normal: the grasp parameterization
/// `u = (p, v)` with `v` pointing into the mesh body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuctionGrasp {
    pub point: Point3<f64>,
    pub approach: Vector3<f64>,
}

impl SuctionGrasp {
    pub fn new(point: Point3<f64>, approach: Vector3<f64>) -> Self {
        Self {
            point,
            approach: approach.normalize(),
        }
    }
}

/// Samples points uniformly by surface area: triangle chosen proportional to
/// area, then uniform barycentric coordinates. Normals face into the body,
/// using the file winding convention (counterclockwise = outward).
pub fn sample_surface(mesh: &Mesh, count: usize, rng: &mut impl Rng) -> Result<Vec<SuctionGrasp>> {
    let n = mesh.triangles().len();
    let mut cumulative = Vec::with_capacity(n);
    let mut total = 0.0;
    for i in 0..n {
        total += mesh.triangle_area(i);
        cumulative.push(total);
    }
    if total <= 0.0 {
        return Err(Error::DegenerateMesh("zero surface area".into()));
    }
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let target = rng.random::<f64>() * total;
        let idx = match cumulative.binary_search_by(|a| a.partial_cmp(&target).unwrap()) {
            Ok(i) | Err(i) => i.min(n - 1),
        };
        let [a, b, c] = mesh.triangle_points(idx);
        // Uniform point in a triangle via square-root warping.
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let s = r1.sqrt();
        let p = a.coords * (1.0 - s) + b.coords * (s * (1.0 - r2)) + c.coords * (s * r2);
        let inward = -mesh.triangle_normal(idx);
        out.push(SuctionGrasp::new(Point3::from(p), inward));
    }
    Ok(out)
}
