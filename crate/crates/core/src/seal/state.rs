//! Cup spring-system state: the undeformed right pyramid, its projection onto
//! the mesh surface, and the apex placement.

use nalgebra::{Point3, Vector3};

use super::{CupModel, SealFailure, SealParams};
use crate::geometry::{Bvh, Mesh, SuctionGrasp};

/// Rest or current lengths for the three spring classes. Perimeter springs
/// link neighboring ring vertices, cone springs link each ring vertex to the
/// apex, flexion springs link second neighbors to resist bending.
#[derive(Debug, Clone)]
pub struct SpringLengths {
    pub perimeter: Vec<f64>,
    pub cone: Vec<f64>,
    pub flexion: Vec<f64>,
}

/// Configuration of the conical spring system `C(n, r, h)`.
#[derive(Debug, Clone)]
pub struct CupState {
    /// Ring vertices; undeformed they form a regular n-gon of circumradius r.
    pub base_vertices: Vec<Point3<f64>>,
    pub apex: Point3<f64>,
    /// Surface polyline per perimeter spring (straight chords while undeformed).
    pub perimeter_paths: Vec<Vec<Point3<f64>>>,
    pub rest_lengths: SpringLengths,
    pub current_lengths: SpringLengths,
    /// Approach direction (unit, toward the mesh).
    pub approach: Vector3<f64>,
    /// Target point on the surface.
    pub target: Point3<f64>,
    /// Standoff distance used for projection rays; large enough that ray
    /// origins backed off along the approach sit outside the object.
    pub standoff: f64,
    /// In-plane ring axes (the base plane is orthogonal to the approach).
    pub ring_x: Vector3<f64>,
    pub ring_y: Vector3<f64>,
    pub deformed: bool,
}

impl CupState {
    pub fn ring_size(&self) -> usize {
        self.base_vertices.len()
    }

    pub fn max_strain(&self) -> f64 {
        self.strains().fold(0.0, f64::max)
    }

    /// Strain per spring, `|current - rest| / rest`, perimeter then cone then
    /// flexion.
    pub fn strains(&self) -> impl Iterator<Item = f64> + '_ {
        let c = &self.current_lengths;
        let r = &self.rest_lengths;
        c.perimeter
            .iter()
            .zip(&r.perimeter)
            .chain(c.cone.iter().zip(&r.cone))
            .chain(c.flexion.iter().zip(&r.flexion))
            .map(|(cur, rest)| (cur - rest).abs() / rest)
    }
}

/// Undeformed right-pyramid state aligned with the approach line. The ring
/// phase is deterministic: vertex 0 lies along the projection of
/// `params.ring_axis` (default world x, falling back to world y near
/// degeneracy) into the base plane.
pub fn init_cup(
    cup: &CupModel,
    grasp: &SuctionGrasp,
    mesh: &Mesh,
    params: &SealParams,
) -> CupState {
    let v = grasp.approach.normalize();
    let axis = params.ring_axis.unwrap_or_else(|| {
        if v.dot(&Vector3::x()).abs() > 0.99 {
            Vector3::y()
        } else {
            Vector3::x()
        }
    });
    let ring_x = (axis - axis.dot(&v) * v).normalize();
    let ring_y = v.cross(&ring_x);

    // Standoff beyond the largest vertex extent so the whole cup starts clear
    // of the object.
    let standoff = mesh.extent_about(&grasp.point) + cup.height + 1e-3;
    let apex = grasp.point - v * standoff;
    let center = apex + v * cup.height;

    let n = cup.vertex_count;
    let base_vertices: Vec<Point3<f64>> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64;
            center + cup.radius * (theta.cos() * ring_x + theta.sin() * ring_y)
        })
        .collect();

    let rest = SpringLengths {
        perimeter: vec![cup.perimeter_rest_length(); n],
        cone: vec![cup.cone_rest_length(); n],
        flexion: vec![cup.flexion_rest_length(); n],
    };
    let current = rest.clone();
    let perimeter_paths = (0..n)
        .map(|i| chord_samples(&base_vertices[i], &base_vertices[(i + 1) % n], params.samples_per_spring))
        .collect();

    CupState {
        base_vertices,
        apex,
        perimeter_paths,
        rest_lengths: rest,
        current_lengths: current,
        approach: v,
        target: grasp.point,
        standoff,
        ring_x,
        ring_y,
        deformed: false,
    }
}

fn chord_samples(a: &Point3<f64>, b: &Point3<f64>, m: usize) -> Vec<Point3<f64>> {
    (0..=m + 1)
        .map(|j| {
            let t = j as f64 / (m + 1) as f64;
            Point3::from(a.coords * (1.0 - t) + b.coords * t)
        })
        .collect()
}

/// Projects the ring onto the mesh along the approach: each base vertex moves
/// to its first intersection, and each perimeter spring becomes the polyline
/// of `m` projected chord samples (the surface trace within the approach
/// prism). The grid of interior rays inside the ring must all hit the mesh.
pub fn project_perimeter(
    state: &CupState,
    bvh: &Bvh,
    params: &SealParams,
) -> Result<CupState, SealFailure> {
    let v = state.approach;
    let n = state.ring_size();
    let cast = |p: &Point3<f64>| {
        let origin = p - v * state.standoff;
        bvh.ray_intersect(&origin, &v).map(|h| h.point)
    };

    // Ring vertices first: a miss here is a vertex_miss failure.
    let mut projected = Vec::with_capacity(n);
    for p in &state.base_vertices {
        match cast(p) {
            Some(q) => projected.push(q),
            None => return Err(SealFailure::VertexMiss),
        }
    }

    // Interior grid inside the ring polygon: any miss is a hole under the cup.
    let center = Point3::from(
        state
            .base_vertices
            .iter()
            .fold(Vector3::zeros(), |acc, p| acc + p.coords)
            / n as f64,
    );
    let r = (state.base_vertices[0] - center).norm();
    let apothem_frac = (std::f64::consts::PI / n as f64).cos() * 0.999;
    let g = params.hole_grid;
    for i in 0..g {
        for j in 0..g {
            let xi = (-1.0 + (2.0 * i as f64 + 1.0) / g as f64) * r;
            let eta = (-1.0 + (2.0 * j as f64 + 1.0) / g as f64) * r;
            if !inside_ngon(xi, eta, n, r * apothem_frac) {
                continue;
            }
            let p = center + xi * state.ring_x + eta * state.ring_y;
            if cast(&p).is_none() {
                return Err(SealFailure::Hole);
            }
        }
    }

    // Perimeter paths: project the undeformed chord samples. A gap under the
    // ring path itself also breaks the seal.
    let mut paths = Vec::with_capacity(n);
    let mut perimeter = Vec::with_capacity(n);
    for i in 0..n {
        let a = state.base_vertices[i];
        let b = state.base_vertices[(i + 1) % n];
        let mut path = Vec::with_capacity(params.samples_per_spring + 2);
        path.push(projected[i]);
        for j in 1..=params.samples_per_spring {
            let t = j as f64 / (params.samples_per_spring + 1) as f64;
            let q = Point3::from(a.coords * (1.0 - t) + b.coords * t);
            match cast(&q) {
                Some(h) => path.push(h),
                None => return Err(SealFailure::Hole),
            }
        }
        path.push(projected[(i + 1) % n]);
        perimeter.push(polyline_length(&path));
        paths.push(path);
    }

    let mut out = state.clone();
    out.base_vertices = projected;
    out.perimeter_paths = paths;
    out.current_lengths.perimeter = perimeter;
    out.deformed = true;
    Ok(out)
}

/// Places the apex on the approach line: the signed offset
/// `t* = min(mean((v_i - p) . v) - h, 0)` puts the apex at `p + t* v`, keeping
/// the average distance to the ring along the approach equal to the cup
/// height while never sinking below the target surface (the clamp).
pub fn place_apex(state: &CupState, grasp: &SuctionGrasp, cup: &CupModel) -> CupState {
    let t_star = apex_offset(state, grasp, cup);
    let mut out = state.clone();
    out.apex = grasp.point + t_star * state.approach;
    let n = out.ring_size();
    out.current_lengths.cone = (0..n)
        .map(|i| (out.base_vertices[i] - out.apex).norm())
        .collect();
    out.current_lengths.flexion = (0..n)
        .map(|i| (out.base_vertices[i] - out.base_vertices[(i + 2) % n]).norm())
        .collect();
    out
}

pub fn apex_offset(state: &CupState, grasp: &SuctionGrasp, cup: &CupModel) -> f64 {
    let v = state.approach;
    let n = state.ring_size() as f64;
    let mean: f64 = state
        .base_vertices
        .iter()
        .map(|q| (q - grasp.point).dot(&v))
        .sum::<f64>()
        / n;
    (mean - cup.height).min(0.0)
}

fn polyline_length(path: &[Point3<f64>]) -> f64 {
    path.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
}

fn inside_ngon(xi: f64, eta: f64, n: usize, apothem: f64) -> bool {
    for k in 0..n {
        // Edge outward normals bisect the vertex angles.
        let a = std::f64::consts::TAU * (k as f64 + 0.5) / n as f64;
        if xi * a.cos() + eta * a.sin() > apothem {
            return false;
        }
    }
    true
}
