//! Baseline grasp-quality metrics. Every metric returns "higher is better";
//! inverse-distance and inverse-error conventions are applied here.

use nalgebra::{Matrix3, Point3, Vector3};
use serde::{Deserialize, Serialize};

use crate::geometry::SuctionGrasp;
use crate::robustness::{robust_wrench_resistance, PerturbationSpec, RobustnessEnv};
use crate::seal::spring_stretch_metric;

/// Guard against the perfect-plane / zero-distance pole.
pub const ETA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QualityMetric {
    Planarity,
    Centroid,
    PlanarityCentroid,
    Pc3d,
    SpringStretch,
    WrenchResistance,
    RobustWrenchResistance,
}

impl std::str::FromStr for QualityMetric {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "planarity" => Ok(Self::Planarity),
            "centroid" => Ok(Self::Centroid),
            "planarity_centroid" | "pc" => Ok(Self::PlanarityCentroid),
            "pc3d" => Ok(Self::Pc3d),
            "spring_stretch" | "ss" => Ok(Self::SpringStretch),
            "wrench_resistance" | "wr" => Ok(Self::WrenchResistance),
            "robust_wrench_resistance" | "rwr" => Ok(Self::RobustWrenchResistance),
            other => Err(format!("unknown metric {:?}", other)),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricParams {
    /// Disc radius for planarity fits; the suction cup radius.
    pub disc_radius: f64,
    /// Planarity gate: SSE per point at or below this passes.
    pub planarity_sse_per_point: f64,
    /// Surface points presampled for mesh-based disc queries.
    pub surface_samples: usize,
}

impl Default for MetricParams {
    fn default() -> Self {
        Self {
            disc_radius: 0.0075,
            planarity_sse_per_point: 1e-6,
            surface_samples: 4096,
        }
    }
}

/// Least-squares plane through `points`: returns (centroid, unit normal, SSE),
/// SSE being the total squared orthogonal residual (the smallest eigenvalue of
/// the scatter matrix).
pub fn fit_plane(points: &[Point3<f64>]) -> Option<(Point3<f64>, Vector3<f64>, f64)> {
    if points.len() < 3 {
        return None;
    }
    let n = points.len() as f64;
    let centroid = Point3::from(points.iter().fold(Vector3::zeros(), |a, p| a + p.coords) / n);
    let mut scatter = Matrix3::zeros();
    for p in points {
        let d = p - centroid;
        scatter += d * d.transpose();
    }
    let eig = scatter.symmetric_eigen();
    let mut min_i = 0;
    for i in 1..3 {
        if eig.eigenvalues[i] < eig.eigenvalues[min_i] {
            min_i = i;
        }
    }
    let normal = eig.eigenvectors.column(min_i).normalize();
    Some((centroid, normal, eig.eigenvalues[min_i].max(0.0)))
}

/// Points of `cloud` within `radius` of `p`.
pub fn disc_points(cloud: &[Point3<f64>], p: &Point3<f64>, radius: f64) -> Vec<Point3<f64>> {
    cloud
        .iter()
        .filter(|q| (*q - p).norm() <= radius)
        .copied()
        .collect()
}

/// Inverse sum of squared errors from the local approach plane: `1/(SSE+eta)`.
/// Fewer than three points in the disc scores zero.
pub fn planarity_metric(cloud: &[Point3<f64>], grasp: &SuctionGrasp, params: &MetricParams) -> f64 {
    let pts = disc_points(cloud, &grasp.point, params.disc_radius);
    match fit_plane(&pts) {
        Some((_, _, sse)) => 1.0 / (sse + ETA),
        None => 0.0,
    }
}

/// Inverse distance to the object centroid: `1/(dist+eta)`.
pub fn centroid_metric(centroid: &Point3<f64>, grasp: &SuctionGrasp) -> f64 {
    1.0 / ((grasp.point - centroid).norm() + ETA)
}

/// Centroid metric gated on local planarity: zero unless the disc SSE stays
/// at or below the per-point threshold.
pub fn planarity_centroid_metric(
    cloud: &[Point3<f64>],
    centroid: &Point3<f64>,
    grasp: &SuctionGrasp,
    params: &MetricParams,
) -> f64 {
    let pts = disc_points(cloud, &grasp.point, params.disc_radius);
    match fit_plane(&pts) {
        Some((_, _, sse)) if sse <= params.planarity_sse_per_point * pts.len() as f64 => {
            centroid_metric(centroid, grasp)
        }
        _ => 0.0,
    }
}

/// Mesh-side metric evaluator: robustness environment plus a presampled
/// surface cloud for the disc-based metrics.
pub struct MeshMetricEnv<'a> {
    pub env: &'a RobustnessEnv<'a>,
    pub surface: Vec<Point3<f64>>,
    pub params: MetricParams,
    pub perturbation: PerturbationSpec,
    pub seed: u64,
}

impl<'a> MeshMetricEnv<'a> {
    pub fn new(
        env: &'a RobustnessEnv<'a>,
        params: MetricParams,
        perturbation: PerturbationSpec,
        seed: u64,
    ) -> Self {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5f5f_5f5f);
        let surface = crate::geometry::sample_surface(env.mesh, params.surface_samples, &mut rng)
            .map(|s| s.into_iter().map(|g| g.point).collect())
            .unwrap_or_default();
        Self {
            env,
            surface,
            params,
            perturbation,
            seed,
        }
    }

    pub fn evaluate(&self, kind: QualityMetric, grasp: &SuctionGrasp) -> f64 {
        match kind {
            QualityMetric::Planarity => planarity_metric(&self.surface, grasp, &self.params),
            QualityMetric::Centroid => {
                centroid_metric(&self.env.mesh.center_of_mass(), grasp)
            }
            QualityMetric::PlanarityCentroid | QualityMetric::Pc3d => planarity_centroid_metric(
                &self.surface,
                &self.env.mesh.center_of_mass(),
                grasp,
                &self.params,
            ),
            QualityMetric::SpringStretch => {
                let s = spring_stretch_metric(
                    &self.env.cup,
                    grasp,
                    self.env.mesh,
                    self.env.bvh,
                    &self.env.seal_params,
                );
                1.0 / (1.0 + s) // infinite stretch maps to zero quality
            }
            QualityMetric::WrenchResistance => {
                let (seal, resist) = self.env.noiseless_reward(grasp);
                if seal.feasible && resist.resists {
                    1.0
                } else {
                    0.0
                }
            }
            QualityMetric::RobustWrenchResistance => {
                robust_wrench_resistance(self.env, grasp, &self.perturbation, self.seed).lambda
            }
        }
    }
}
