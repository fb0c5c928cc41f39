//! Resting poses from quasi-static analysis over convex-hull facets.

use nalgebra::{Matrix3, Point3, Unit, Vector3};

use super::hull::ConvexHull;
use super::mesh::Mesh;
use super::transform::RigidTransform;
use crate::error::{Error, Result};

/// A resting orientation on the z = 0 table.
#[derive(Debug, Clone)]
pub struct StablePose {
    /// Places the object on the table: support facet level at z = 0, center
    /// of mass on the z axis.
    pub transform: RigidTransform,
    /// Hull facet the object rests on.
    pub support_facet: usize,
    /// Fraction of initial orientations settling onto this facet, estimated
    /// by the facet solid angle subtended at the center of mass.
    pub probability: f64,
}

/// One pose per hull facet whose interior contains the projection of the
/// center of mass along the facet normal, sorted by descending probability.
pub fn stable_poses(mesh: &Mesh) -> Result<Vec<StablePose>> {
    if !mesh.is_watertight() {
        return Err(Error::NotWatertight { boundary_edges: 0 });
    }
    let hull = ConvexHull::build(mesh.vertices())?;
    stable_poses_from_hull(mesh, &hull)
}

pub fn stable_poses_from_hull(mesh: &Mesh, hull: &ConvexHull) -> Result<Vec<StablePose>> {
    let com = mesh.center_of_mass();
    let mut poses = Vec::new();
    let mut total = 0.0;
    for fi in 0..hull.facets.len() {
        if !hull.projects_inside(fi, &com) {
            continue;
        }
        let omega = hull.facet_solid_angle(fi, &com);
        total += omega;
        poses.push((fi, omega));
    }
    if poses.is_empty() {
        return Err(Error::HullFailed(
            "no facet contains the center-of-mass projection".into(),
        ));
    }
    let mut out: Vec<StablePose> = poses
        .into_iter()
        .map(|(fi, omega)| StablePose {
            transform: facet_down_transform(hull, fi, &com),
            support_facet: fi,
            probability: omega / total,
        })
        .collect();
    out.sort_by(|a, b| {
        b.probability
            .partial_cmp(&a.probability)
            .unwrap()
            .then(a.support_facet.cmp(&b.support_facet))
    });
    Ok(out)
}

/// Rotation taking the facet outward normal to -z (facet flush on the table),
/// then translation putting the facet plane at z = 0 and the center of mass on
/// the z axis.
fn facet_down_transform(hull: &ConvexHull, facet: usize, com: &Point3<f64>) -> RigidTransform {
    let n = hull.facets[facet].normal;
    let target = Vector3::new(0.0, 0.0, -1.0);
    let rotation = rotation_between(&n, &target);
    let p0 = rotation * hull.facet_plane_point(facet).coords;
    let com_r = rotation * com.coords;
    let translation = Vector3::new(-com_r.x, -com_r.y, -p0.z);
    RigidTransform::new(rotation, translation)
}

fn rotation_between(from: &Vector3<f64>, to: &Vector3<f64>) -> Matrix3<f64> {
    let cross = from.cross(to);
    let dot = from.dot(to);
    if cross.norm() < 1e-12 {
        if dot > 0.0 {
            return Matrix3::identity();
        }
        // Antiparallel: rotate half a turn about any orthogonal axis.
        let axis = if from.x.abs() < 0.9 {
            from.cross(&Vector3::x()).normalize()
        } else {
            from.cross(&Vector3::y()).normalize()
        };
        return nalgebra::Rotation3::from_axis_angle(&Unit::new_unchecked(axis), std::f64::consts::PI)
            .into_inner();
    }
    let axis = Unit::new_normalize(cross);
    nalgebra::Rotation3::from_axis_angle(&axis, dot.clamp(-1.0, 1.0).acos()).into_inner()
}
