//! Property tests for the geometric and contact invariants.

use nalgebra::{DVector, Point3, Unit, Vector3, Vector6};
use proptest::prelude::*;

use vacugrasp_core::contact::{
    contact_frame, wrench_resistance, GraspMap, RingContactModel, WrenchBasis, WrenchMetric,
    RESISTANCE_TOL,
};
use vacugrasp_core::geometry::{primitives, AdjointMap, Bvh, RigidTransform, SuctionGrasp};
use vacugrasp_core::seal::{check_seal, CupModel, SealParams};
use vacugrasp_core::stats::pr_series;

fn unit_vector() -> impl Strategy<Value = Vector3<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(x, y, z)| x * x + y * y + z * z > 1e-3)
        .prop_map(|(x, y, z)| Vector3::new(x, y, z).normalize())
}

fn rigid_transform() -> impl Strategy<Value = RigidTransform> {
    (
        unit_vector(),
        0.0..std::f64::consts::TAU,
        -0.5..0.5f64,
        -0.5..0.5f64,
        -0.5..0.5f64,
    )
        .prop_map(|(axis, angle, x, y, z)| {
            let mut t = RigidTransform::rotation_about(Unit::new_unchecked(axis), angle);
            t.translation = Vector3::new(x, y, z);
            t
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Adjoint columns match the wrench transported by direct cross products.
    #[test]
    fn adjoint_consistency(pose in rigid_transform(),
                           f in prop::array::uniform3(-10.0..10.0f64),
                           tau in prop::array::uniform3(-1.0..1.0f64)) {
        let w = Vector6::new(f[0], f[1], f[2], tau[0], tau[1], tau[2]);
        let mapped = AdjointMap::new(&pose).apply(&w);
        let fv = Vector3::new(f[0], f[1], f[2]);
        let tv = Vector3::new(tau[0], tau[1], tau[2]);
        let f_o = pose.rotation * fv;
        let tau_o = pose.translation.cross(&f_o) + pose.rotation * tv;
        for i in 0..3 {
            prop_assert!((mapped[i] - f_o[i]).abs() < 1e-10);
            prop_assert!((mapped[i + 3] - tau_o[i]).abs() < 1e-10);
        }
    }

    /// A perpendicular approach onto any plane patch larger than the cup
    /// seals with (numerically) zero strain, at any position and ring phase.
    #[test]
    fn planar_completeness(tilt_axis in unit_vector(),
                           tilt in 0.0..1.2f64,
                           dx in -0.01..0.01f64,
                           dy in -0.01..0.01f64,
                           phase in 0.0..std::f64::consts::TAU) {
        let axis = Vector3::new(tilt_axis.x, tilt_axis.y, 0.0);
        let rot = if axis.norm() > 1e-6 {
            RigidTransform::rotation_about(Unit::new_normalize(axis), tilt)
        } else {
            RigidTransform::identity()
        };
        let plate = primitives::plate(0.08, 0.01, 0.0).transformed(&rot);
        let bvh = Bvh::build(&plate);
        let normal = rot.transform_vector(&Vector3::z());
        let target = rot.transform_point(&Point3::new(dx, dy, 0.0));
        let grasp = SuctionGrasp::new(target, -normal);
        // Ring phase via an explicit tangent reference.
        let tangent = rot.transform_vector(&Vector3::new(phase.cos(), phase.sin(), 0.0));
        let params = SealParams { ring_axis: Some(tangent), ..Default::default() };
        let result = check_seal(&CupModel::default(), &grasp, &plate, &bvh, &params);
        prop_assert!(result.feasible, "failure {:?}", result.failure);
        prop_assert!(result.max_strain < 1e-6, "strain {}", result.max_strain);
    }

    /// Constructive wrench resistance: any feasible alpha defines a wrench
    /// the solver must cancel.
    #[test]
    fn feasible_alpha_is_resisted(v in unit_vector(),
                                  fx in -0.9..0.9f64,
                                  fy in -0.9..0.9f64,
                                  fz in -0.9..2.0f64,
                                  tx in -0.9..0.9f64,
                                  ty in -0.9..0.9f64,
                                  tz in -0.9..0.9f64) {
        let model = RingContactModel::new(0.0075, 0.5, 0.005, 250.0);
        let f_z = fz * 100.0;
        let ft = model.tangent_force_bound(f_z);
        let tt = model.tangent_torque_bound();
        let tzb = model.radius * model.friction * (f_z + model.vacuum_force) / 3.0f64.sqrt();
        let mut alpha = DVector::zeros(6);
        alpha[0] = fx * ft;
        alpha[1] = fy * ft;
        alpha[2] = f_z;
        alpha[3] = tx * tt;
        alpha[4] = ty * tt;
        alpha[5] = tz * tzb;
        let cs = model.constraints();
        prop_assume!(cs.satisfied(&alpha, 1e-12));
        let gmap = GraspMap::new(&contact_frame(&Point3::origin(), &v), WrenchBasis::ring());
        let ga = &gmap.matrix * &alpha;
        let w = -Vector6::from_iterator(ga.iter().copied());
        let metric = WrenchMetric::for_cup_radius(model.radius);
        let res = wrench_resistance(&gmap, &cs, &w, &metric, RESISTANCE_TOL);
        prop_assert!(res.resists, "residual {}", res.residual);
    }

    /// Recall never decreases as the threshold drops; attempt rate reaches 1.
    #[test]
    fn pr_series_is_monotone(scores in prop::collection::vec((0.0..1.0f64, any::<bool>()), 2..80)) {
        prop_assume!(scores.iter().any(|(_, l)| *l));
        let series = pr_series(&scores);
        for w in series.windows(2) {
            prop_assert!(w[1].recall >= w[0].recall - 1e-12);
            prop_assert!(w[1].attempt_rate >= w[0].attempt_rate);
        }
        let last = series.last().unwrap();
        prop_assert!((last.attempt_rate - 1.0).abs() < 1e-12);
        prop_assert!((last.recall - 1.0).abs() < 1e-12);
    }
}
