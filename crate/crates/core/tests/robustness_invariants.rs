//! Statistical invariants of the Monte-Carlo robustness estimator.

use nalgebra::{Point3, Vector3};
use vacugrasp_core::contact::RingContactModel;
use vacugrasp_core::geometry::{primitives, Bvh, SuctionGrasp};
use vacugrasp_core::robustness::{
    robust_wrench_resistance, PerturbationSpec, RobustnessEnv, TrialOutcome,
};
use vacugrasp_core::seal::CupModel;
use vacugrasp_core::stats::{mean, std_dev};

fn env<'a>(mesh: &'a vacugrasp_core::Mesh, bvh: &'a Bvh) -> RobustnessEnv<'a> {
    RobustnessEnv::new(
        mesh,
        bvh,
        CupModel::default(),
        RingContactModel::new(0.0075, 0.5, 0.005, 250.0),
    )
}

#[test]
fn soft_finger_env_differs_on_torque_demands() {
    // With the soft-finger model selected, trials involving tangential pull
    // still pass on a flat top (friction against |f_z|), and the resistance
    // path goes through the sign-branch solver.
    use vacugrasp_core::robustness::ResistanceModel;
    let mesh = primitives::table_cube(0.05);
    let bvh = Bvh::build(&mesh);
    let mut soft_env = env(&mesh, &bvh);
    soft_env.model = ResistanceModel::SoftFinger { gamma: 0.005 };
    let grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 0.05), Vector3::new(0.0, 0.0, -1.0));
    let (seal, resist) = soft_env.noiseless_reward(&grasp);
    assert!(seal.feasible);
    // Pure aligned gravity: the soft finger pulls with f_z = -mg, feasible
    // since f_z is unconstrained in sign.
    assert!(resist.resists, "residual {}", resist.residual);
    let spec = PerturbationSpec {
        samples: 40,
        ..Default::default()
    };
    let lam = robust_wrench_resistance(&soft_env, &grasp, &spec, 2).lambda;
    assert!(lam > 0.5, "soft-finger lambda {}", lam);
}

#[test]
fn trial_records_export_as_csv() {
    let mesh = primitives::table_cube(0.05);
    let bvh = Bvh::build(&mesh);
    let env = env(&mesh, &bvh);
    let grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 0.05), Vector3::new(0.0, 0.0, -1.0));
    let spec = PerturbationSpec {
        samples: 12,
        ..Default::default()
    };
    let res = robust_wrench_resistance(&env, &grasp, &spec, 1);
    let csv = vacugrasp_core::robustness::records_to_csv(&res.records);
    assert!(csv.starts_with("trial,outcome,friction"));
    assert_eq!(csv.lines().count(), 13); // header + 12 trials
}

#[test]
fn lambda_estimator_variance_is_binomial() {
    // A borderline grasp (doubled noise keeps lambda well inside (0, 1)):
    // the across-seed std of lambda must stay within 1.5x the binomial bound.
    let mesh = primitives::table_cube(0.05);
    let bvh = Bvh::build(&mesh);
    let env = env(&mesh, &bvh);
    let grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 0.05), Vector3::new(0.0, 0.0, -1.0));
    let spec = PerturbationSpec {
        samples: 60,
        ..Default::default()
    }
    .scaled_noise(2.0);
    let lambdas: Vec<f64> = (0..20)
        .map(|seed| robust_wrench_resistance(&env, &grasp, &spec, seed).lambda)
        .collect();
    let lbar = mean(&lambdas);
    assert!(lbar > 0.1 && lbar < 0.9, "not a borderline grasp: {}", lbar);
    let expected = (lbar * (1.0 - lbar) / spec.samples as f64).sqrt();
    let empirical = std_dev(&lambdas);
    assert!(
        empirical <= 1.5 * expected,
        "std {} vs binomial bound {}",
        empirical,
        expected
    );
}

#[test]
fn sandwich_between_noiseless_and_robust_reward() {
    // lambda = 1 implies the noiseless evaluation passes too.
    let mesh = primitives::table_cube(0.05);
    let bvh = Bvh::build(&mesh);
    let env = env(&mesh, &bvh);
    let grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 0.05), Vector3::new(0.0, 0.0, -1.0));
    let gentle = PerturbationSpec {
        samples: 50,
        ..Default::default()
    }
    .scaled_noise(0.2);
    let res = robust_wrench_resistance(&env, &grasp, &gentle, 4);
    assert_eq!(res.lambda, 1.0, "benchmark grasp should be all-pass");
    let (seal, resist) = env.noiseless_reward(&grasp);
    assert!(seal.feasible && resist.resists);

    // And a grasp that fails at every sampled perturbation has lambda = 0
    // with a failing noiseless evaluation.
    let fin = primitives::fin_block(0.04, 0.01, 0.001, 0.02);
    let fin_bvh = Bvh::build(&fin);
    let fin_env = self::env(&fin, &fin_bvh);
    let fin_grasp = SuctionGrasp::new(Point3::new(0.0, 0.0, 0.03), Vector3::new(0.0, 0.0, -1.0));
    let res = robust_wrench_resistance(&fin_env, &fin_grasp, &gentle, 4);
    assert_eq!(res.lambda, 0.0);
    assert!(res
        .records
        .iter()
        .all(|r| r.outcome != TrialOutcome::Success));
    let (seal, _) = fin_env.noiseless_reward(&fin_grasp);
    assert!(!seal.feasible);
}
