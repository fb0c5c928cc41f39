use nalgebra::{Matrix3, Matrix6, Point3, Unit, Vector3, Vector6};

/// A proper rigid transform: orthonormal rotation (det +1) plus translation in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

pub const ORTHONORMAL_TOL: f64 = 1e-9;

impl RigidTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        let t = Self {
            rotation,
            translation,
        };
        debug_assert!(t.is_valid(ORTHONORMAL_TOL));
        t
    }

    /// Rotation about `axis` by `angle` radians (Rodrigues), no translation.
    pub fn rotation_about(axis: Unit<Vector3<f64>>, angle: f64) -> Self {
        Self {
            rotation: nalgebra::Rotation3::from_axis_angle(&axis, angle).into_inner(),
            translation: Vector3::zeros(),
        }
    }

    /// Exponential of a rotation vector (Lie-algebra rotational coordinates).
    pub fn from_rotation_vector(omega: Vector3<f64>) -> Self {
        let angle = omega.norm();
        if angle < 1e-14 {
            return Self::identity();
        }
        Self::rotation_about(Unit::new_unchecked(omega / angle), angle)
    }

    pub fn is_valid(&self, tol: f64) -> bool {
        let gram = self.rotation.transpose() * self.rotation;
        (gram - Matrix3::identity()).norm() <= tol * 10.0
            && (self.rotation.determinant() - 1.0).abs() <= tol * 10.0
    }

    pub fn transform_point(&self, p: &Point3<f64>) -> Point3<f64> {
        Point3::from(self.rotation * p.coords + self.translation)
    }

    pub fn transform_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self {
            rotation: rt,
            translation: -(rt * self.translation),
        }
    }

    /// `self * other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }
}

/// 6x6 map taking contact-frame wrenches `(f, tau)` to object-frame wrenches
/// for a contact pose `(R, t)`:
///
/// ```text
/// [ R        0 ]
/// [ [t]x R   R ]
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointMap {
    matrix: Matrix6<f64>,
}

impl AdjointMap {
    pub fn new(pose: &RigidTransform) -> Self {
        let r = pose.rotation;
        let tx = skew(&pose.translation);
        let mut m = Matrix6::zeros();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
        m.fixed_view_mut::<3, 3>(3, 0).copy_from(&(tx * r));
        m.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &Matrix6<f64> {
        &self.matrix
    }

    pub fn apply(&self, wrench: &Vector6<f64>) -> Vector6<f64> {
        self.matrix * wrench
    }
}

/// Cross-product matrix: `skew(a) * b == a.cross(&b)`.
pub fn skew(a: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}
