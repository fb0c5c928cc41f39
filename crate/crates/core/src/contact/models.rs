//! Contact wrench bases and the linear constraint sets on their magnitudes.
//!
//! Wrench magnitude vectors are ordered `(f_x, f_y, f_z, tau_x, tau_y, tau_z)`
//! for the suction ring model and `(f_x, f_y, f_z, tau_z)` for the soft-finger
//! model. Constraints are half-spaces `L alpha <= c`.

use nalgebra::{DMatrix, DVector, Matrix3, Point3, Vector3};

use crate::geometry::RigidTransform;

/// Linear inequality system over basis-wrench magnitudes.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    pub lhs: DMatrix<f64>,
    pub rhs: DVector<f64>,
}

impl ConstraintSet {
    pub fn satisfied(&self, alpha: &DVector<f64>, tol: f64) -> bool {
        let v = &self.lhs * alpha - &self.rhs;
        v.iter().all(|&x| x <= tol)
    }
}

/// Orthonormal basis wrenches in the contact frame, one column per magnitude.
#[derive(Debug, Clone)]
pub struct WrenchBasis {
    pub matrix: DMatrix<f64>, // 6 x m
}

impl WrenchBasis {
    /// Full six-dimensional basis: unit forces then unit torques.
    pub fn ring() -> Self {
        Self {
            matrix: DMatrix::identity(6, 6),
        }
    }

    /// Soft-finger basis: forces along x, y, z plus torque about z.
    pub fn soft_finger() -> Self {
        let mut m = DMatrix::zeros(6, 4);
        m[(0, 0)] = 1.0;
        m[(1, 1)] = 1.0;
        m[(2, 2)] = 1.0;
        m[(5, 3)] = 1.0;
        Self { matrix: m }
    }
}

/// Suction ring contact: vacuum force `V`, Coulomb friction `mu` against the
/// normal force `f_N = f_z + V`, and elastic restoring torques bounded by the
/// material limit `kappa`.
#[derive(Debug, Clone, Copy)]
pub struct RingContactModel {
    /// Contact ring radius in meters.
    pub radius: f64,
    /// Coulomb friction coefficient.
    pub friction: f64,
    /// Elastic limit of the cup material; the tangent-torque bound is
    /// `pi * radius * kappa / sqrt(2)`. The constant's units are not fully
    /// specified; with radius in meters the bound is treated as N*m.
    pub kappa: f64,
    /// Vacuum force magnitude in Newtons.
    pub vacuum_force: f64,
}

impl RingContactModel {
    pub fn new(radius: f64, friction: f64, kappa: f64, vacuum_force: f64) -> Self {
        assert!(radius > 0.0 && vacuum_force > 0.0 && friction >= 0.0 && kappa >= 0.0);
        Self {
            radius,
            friction,
            kappa,
            vacuum_force,
        }
    }

    /// Eleven half-spaces: six friction rows coupling the tangent force and
    /// torsion to `f_N = f_z + V` (the box inscribed in the friction limit
    /// ellipsoid), four material rows bounding the tangent torques, and the
    /// vacuum row `f_z >= -V`.
    ///
    /// Row order: `fx+, fx-, fy+, fy-, tz+, tz-, tx+, tx-, ty+, ty-, vacuum`.
    pub fn constraints(&self) -> ConstraintSet {
        let s3 = 3.0f64.sqrt();
        let s2 = 2.0f64.sqrt();
        let mu = self.friction;
        let r = self.radius;
        let v = self.vacuum_force;
        let material = std::f64::consts::PI * r * self.kappa;

        let mut lhs = DMatrix::zeros(11, 6);
        let mut rhs = DVector::zeros(11);
        let mut row = 0;
        // sqrt(3) |f_x| <= mu (f_z + V), likewise f_y and r-scaled tau_z.
        for (col, scale) in [(0usize, 1.0), (1, 1.0), (5, 1.0 / r)] {
            for sign in [1.0, -1.0] {
                lhs[(row, col)] = sign * s3 * scale;
                lhs[(row, 2)] = -mu;
                rhs[row] = mu * v;
                row += 1;
            }
        }
        // sqrt(2) |tau_x| <= pi r kappa, likewise tau_y.
        for col in [3usize, 4] {
            for sign in [1.0, -1.0] {
                lhs[(row, col)] = sign * s2;
                rhs[row] = material;
                row += 1;
            }
        }
        // f_z >= -V
        lhs[(row, 2)] = -1.0;
        rhs[row] = v;

        ConstraintSet { lhs, rhs }
    }

    /// Analytic tangent-torque bound `pi r kappa / sqrt(2)`.
    pub fn tangent_torque_bound(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.kappa / 2.0f64.sqrt()
    }

    /// Analytic tangential force bound at a given axial force.
    pub fn tangent_force_bound(&self, f_z: f64) -> f64 {
        self.friction * (f_z + self.vacuum_force) / 3.0f64.sqrt()
    }
}

/// Soft-finger suction contact: Coulomb friction cone about z plus a torsion
/// bound, with `f_z` free in sign because of the vacuum pull. The quadratic
/// cone is linearized by an inscribed pyramid.
#[derive(Debug, Clone, Copy)]
pub struct SoftFingerModel {
    pub friction: f64,
    /// Torsion bound per unit normal force: `|tau_z| <= gamma |f_z|` (meters).
    pub gamma: f64,
    /// Facet count of the inscribed friction pyramid.
    pub cone_facets: usize,
}

impl SoftFingerModel {
    pub fn new(friction: f64, gamma: f64) -> Self {
        assert!(friction >= 0.0 && gamma >= 0.0);
        Self {
            friction,
            gamma,
            cone_facets: 8,
        }
    }

    /// The torsion coupling `|tau_z| <= gamma |f_z|` is nonconvex in alpha, so
    /// the model splits into two convex branches over the sign of `f_z`; the
    /// smaller residual wins. Friction scales with `|f_z|` on both branches.
    pub fn branches(&self) -> [ConstraintSet; 2] {
        [self.branch(1.0), self.branch(-1.0)]
    }

    fn branch(&self, sign: f64) -> ConstraintSet {
        let k = self.cone_facets;
        let inradius = (std::f64::consts::PI / k as f64).cos();
        let rows = k + 3;
        let mut lhs = DMatrix::zeros(rows, 4);
        let rhs = DVector::zeros(rows);
        for i in 0..k {
            let theta = std::f64::consts::TAU * i as f64 / k as f64;
            lhs[(i, 0)] = theta.cos();
            lhs[(i, 1)] = theta.sin();
            lhs[(i, 2)] = -sign * self.friction * inradius;
        }
        lhs[(k, 3)] = 1.0;
        lhs[(k, 2)] = -sign * self.gamma;
        lhs[(k + 1, 3)] = -1.0;
        lhs[(k + 1, 2)] = -sign * self.gamma;
        // Branch sign: sign * f_z >= 0.
        lhs[(k + 2, 2)] = -sign;
        ConstraintSet { lhs, rhs }
    }
}

/// Right-handed contact frame at `p` with the z axis along the (inward)
/// approach `v`. The x axis is the world x axis projected onto the tangent
/// plane, or world y when the approach is nearly parallel to x.
pub fn contact_frame(p: &Point3<f64>, v: &Vector3<f64>) -> RigidTransform {
    let x_ref = if v.dot(&Vector3::x()).abs() > 0.99 {
        Vector3::y()
    } else {
        Vector3::x()
    };
    contact_frame_with_ref(p, v, &x_ref)
}

/// As [`contact_frame`] with an explicit tangent reference; the x axis is the
/// projection of `x_ref` onto the tangent plane.
pub fn contact_frame_with_ref(
    p: &Point3<f64>,
    v: &Vector3<f64>,
    x_ref: &Vector3<f64>,
) -> RigidTransform {
    let z = v.normalize();
    let x = (x_ref - x_ref.dot(&z) * z).normalize();
    let y = z.cross(&x);
    let rotation = Matrix3::from_columns(&[x, y, z]);
    RigidTransform::new(rotation, p.coords)
}
