//! Wrench resistance as a convex QP: a grasp resists `w` iff some feasible
//! combination of basis wrenches cancels it, i.e. the residual
//! `eps* = min_{alpha in F} ||G alpha + w||^2` vanishes.

use nalgebra::{DMatrix, DVector, Vector3, Vector6};

use super::models::{ConstraintSet, SoftFingerModel, WrenchBasis};
use super::qp::{self, solve_qp};
use crate::geometry::{AdjointMap, RigidTransform};

/// Grasp map `G = A W`: adjoint-transformed contact wrench basis in the
/// object frame. Wrenches are referenced at the contact origin with
/// object-frame axes, so the default adjoint carries no moment arm.
#[derive(Debug, Clone)]
pub struct GraspMap {
    pub adjoint: AdjointMap,
    pub basis: WrenchBasis,
    pub matrix: DMatrix<f64>, // 6 x m
}

impl GraspMap {
    pub fn new(contact_pose: &RigidTransform, basis: WrenchBasis) -> Self {
        // Reference point = contact origin: rotation block only.
        let rot_only = RigidTransform::new(contact_pose.rotation, Vector3::zeros());
        let adjoint = AdjointMap::new(&rot_only);
        let mut matrix = DMatrix::zeros(6, basis.matrix.ncols());
        for c in 0..basis.matrix.ncols() {
            let col: Vector6<f64> = Vector6::from_iterator(basis.matrix.column(c).iter().copied());
            let mapped = adjoint.apply(&col);
            for r in 0..6 {
                matrix[(r, c)] = mapped[r];
            }
        }
        Self {
            adjoint,
            basis,
            matrix,
        }
    }
}

/// Commensurates forces (N) and torques (N*m): torques are divided by a
/// length scale rho (the cup radius), so the residual lives in N^2.
#[derive(Debug, Clone, Copy)]
pub struct WrenchMetric {
    pub torque_scale: f64,
}

impl WrenchMetric {
    pub fn for_cup_radius(radius: f64) -> Self {
        Self {
            torque_scale: radius,
        }
    }

    pub fn scale_wrench(&self, w: &Vector6<f64>) -> Vector6<f64> {
        let mut s = *w;
        for i in 3..6 {
            s[i] /= self.torque_scale;
        }
        s
    }
}

/// Residual tolerance below which a wrench counts as resisted, in the scaled
/// metric (N^2). Tight enough that the resist/non-resist flip of a pure
/// tangent torque stays within 1% of the analytic material bound.
pub const RESISTANCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ResistanceResult {
    /// `eps* = min ||S (G alpha + w)||^2` over the constraint set.
    pub residual: f64,
    pub alpha: DVector<f64>,
    pub resists: bool,
    pub iterations: usize,
    pub converged: bool,
}

/// Global minimizer of the wrench-resistance QP for one contact model.
/// Solver non-convergence is reported and treated as non-resistance.
pub fn wrench_resistance(
    gmap: &GraspMap,
    constraints: &ConstraintSet,
    w: &Vector6<f64>,
    metric: &WrenchMetric,
    tol: f64,
) -> ResistanceResult {
    let m = gmap.matrix.ncols();
    // Scaled grasp map and wrench.
    let mut sg = gmap.matrix.clone();
    for r in 3..6 {
        for c in 0..m {
            sg[(r, c)] /= metric.torque_scale;
        }
    }
    let sw = metric.scale_wrench(w);
    let sw_d = DVector::from_iterator(6, sw.iter().copied());

    let h = 2.0 * sg.transpose() * &sg;
    let g = 2.0 * sg.transpose() * &sw_d;

    let sol = solve_qp(
        &h,
        &g,
        &constraints.lhs,
        &constraints.rhs,
        DVector::zeros(m),
        qp::DEFAULT_MAX_ITER,
    );
    let residual = (&sg * &sol.x + &sw_d).norm_squared();
    ResistanceResult {
        residual,
        resists: sol.converged && residual <= tol,
        alpha: sol.x,
        iterations: sol.iterations,
        converged: sol.converged,
    }
}

/// Soft-finger resistance: solves both convex sign branches of the torsion
/// constraint and keeps the smaller residual.
pub fn soft_finger_resistance(
    gmap: &GraspMap,
    model: &SoftFingerModel,
    w: &Vector6<f64>,
    metric: &WrenchMetric,
    tol: f64,
) -> ResistanceResult {
    let [pos, neg] = model.branches();
    let a = wrench_resistance(gmap, &pos, w, metric, tol);
    let b = wrench_resistance(gmap, &neg, w, metric, tol);
    if a.residual <= b.residual {
        a
    } else {
        b
    }
}
