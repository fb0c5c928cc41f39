use std::collections::HashMap;

use nalgebra::{Point3, Vector3};

use super::transform::RigidTransform;
use crate::error::{Error, Result};

/// Triangles with area below this are dropped on construction; below float
/// noise for meter-scale parts.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Watertight triangle surface with mass properties. Vertices are in meters.
///
/// Immutable after construction; safe to share across worker threads.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
    center_of_mass: Point3<f64>,
    mass: f64,
    volume: f64,
    watertight: bool,
    /// Degenerate triangles removed during construction.
    pub removed_degenerate: usize,
}

impl Mesh {
    /// Builds a mesh, dropping degenerate triangles and computing the
    /// volume-integral centroid (uniform density) and watertightness flag.
    pub fn new(vertices: Vec<Point3<f64>>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len() as u32;
        for tri in &triangles {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::DegenerateMesh(format!(
                    "triangle index out of range: {:?} with {} vertices",
                    tri, n
                )));
            }
        }
        let mut kept = Vec::with_capacity(triangles.len());
        let mut removed = 0usize;
        for tri in triangles {
            let a = vertices[tri[0] as usize];
            let b = vertices[tri[1] as usize];
            let c = vertices[tri[2] as usize];
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            if area < DEGENERATE_AREA {
                removed += 1;
            } else {
                kept.push(tri);
            }
        }
        if kept.is_empty() {
            return Err(Error::DegenerateMesh("no non-degenerate triangles".into()));
        }
        let (volume, com) = mass_properties(&vertices, &kept);
        let watertight = boundary_edge_count(&kept) == 0;
        Ok(Self {
            vertices,
            triangles: kept,
            center_of_mass: com,
            mass: 1.0,
            volume,
            watertight,
            removed_degenerate: removed,
        })
    }

    pub fn vertices(&self) -> &[Point3<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_points(&self, idx: usize) -> [Point3<f64>; 3] {
        let t = self.triangles[idx];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    pub fn center_of_mass(&self) -> Point3<f64> {
        self.center_of_mass
    }

    /// Mass in kg. Defaults to 1.0; the wrench model treats mass independently
    /// of the (uniform-density) centroid.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn set_mass(&mut self, mass: f64) {
        self.mass = mass;
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn is_watertight(&self) -> bool {
        self.watertight
    }

    /// Outward unit normal from the triangle winding (counterclockwise = outward).
    pub fn triangle_normal(&self, idx: usize) -> Vector3<f64> {
        let [a, b, c] = self.triangle_points(idx);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn triangle_area(&self, idx: usize) -> f64 {
        let [a, b, c] = self.triangle_points(idx);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    /// Axis-aligned bounds of all vertices.
    pub fn bounds(&self) -> (Point3<f64>, Point3<f64>) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    /// Radius of the vertex set about a point; used for approach standoffs.
    pub fn extent_about(&self, p: &Point3<f64>) -> f64 {
        let (lo, hi) = self.bounds();
        let mut r: f64 = 0.0;
        for &x in &[lo.x, hi.x] {
            for &y in &[lo.y, hi.y] {
                for &z in &[lo.z, hi.z] {
                    r = r.max((Point3::new(x, y, z) - p).norm());
                }
            }
        }
        r
    }

    /// Applies a rigid transform to vertices and center of mass.
    pub fn transformed(&self, t: &RigidTransform) -> Self {
        let vertices = self.vertices.iter().map(|p| t.transform_point(p)).collect();
        Self {
            vertices,
            triangles: self.triangles.clone(),
            center_of_mass: t.transform_point(&self.center_of_mass),
            mass: self.mass,
            volume: self.volume,
            watertight: self.watertight,
            removed_degenerate: self.removed_degenerate,
        }
    }

    /// Uniformly rescales vertices (and recomputes mass properties).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let vertices: Vec<_> = self
            .vertices
            .iter()
            .map(|p| Point3::from(p.coords * s))
            .collect();
        let mut m = Self::new(vertices, self.triangles.clone())?;
        m.mass = self.mass;
        Ok(m)
    }
}

/// Signed volume and centroid by the divergence theorem over signed
/// tetrahedra (origin, a, b, c). Winding must be consistent; volume is
/// positive for counterclockwise-outward triangles.
fn mass_properties(vertices: &[Point3<f64>], triangles: &[[u32; 3]]) -> (f64, Point3<f64>) {
    let mut vol = 0.0;
    let mut centroid = Vector3::zeros();
    for tri in triangles {
        let a = vertices[tri[0] as usize].coords;
        let b = vertices[tri[1] as usize].coords;
        let c = vertices[tri[2] as usize].coords;
        let det = a.dot(&b.cross(&c));
        vol += det / 6.0;
        centroid += det / 24.0 * (a + b + c);
    }
    if vol.abs() < 1e-18 {
        // Open or flat surface: fall back to the area centroid.
        let mut area_sum = 0.0;
        let mut area_centroid = Vector3::zeros();
        for tri in triangles {
            let a = vertices[tri[0] as usize];
            let b = vertices[tri[1] as usize];
            let c = vertices[tri[2] as usize];
            let area = 0.5 * (b - a).cross(&(c - a)).norm();
            area_sum += area;
            area_centroid += area / 3.0 * (a.coords + b.coords + c.coords);
        }
        return (0.0, Point3::from(area_centroid / area_sum.max(1e-30)));
    }
    (vol, Point3::from(centroid / vol))
}

fn boundary_edge_count(triangles: &[[u32; 3]]) -> usize {
    let mut edges: HashMap<(u32, u32), i32> = HashMap::new();
    for tri in triangles {
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            *edges.entry(key).or_insert(0) += 1;
        }
    }
    edges.values().filter(|&&c| c != 2).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;
    use approx::assert_relative_eq;

    #[test]
    fn unit_cube_com_and_watertight() {
        let m = primitives::unit_cube();
        assert_eq!(m.vertices().len(), 8);
        assert_eq!(m.triangles().len(), 12);
        assert!(m.is_watertight());
        assert_relative_eq!(m.center_of_mass().x, 0.5, epsilon = 1e-12);
        assert_relative_eq!(m.center_of_mass().y, 0.5, epsilon = 1e-12);
        assert_relative_eq!(m.center_of_mass().z, 0.5, epsilon = 1e-12);
        assert_relative_eq!(m.volume(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn tetrahedron_com_is_vertex_mean() {
        // Analytic centroid of a simplex: mean of its vertices.
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let tris = vec![[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]];
        let m = Mesh::new(verts, tris).unwrap();
        assert!(m.is_watertight());
        for k in 0..3 {
            assert_relative_eq!(m.center_of_mass()[k], 0.25, epsilon = 1e-12);
        }
        assert_relative_eq!(m.volume(), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn single_triangle_is_not_watertight() {
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let m = Mesh::new(verts, vec![[0, 1, 2]]).unwrap();
        assert!(!m.is_watertight());
    }

    #[test]
    fn degenerate_triangles_are_dropped_with_count() {
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        let m = Mesh::new(verts, vec![[0, 1, 2], [0, 1, 1]]).unwrap();
        assert_eq!(m.triangles().len(), 1);
        assert_eq!(m.removed_degenerate, 1);
    }

    #[test]
    fn out_of_range_index_rejected() {
        let verts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ];
        assert!(Mesh::new(verts, vec![[0, 1, 5]]).is_err());
    }
}
