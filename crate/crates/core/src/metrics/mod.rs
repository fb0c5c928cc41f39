//! Baseline grasp-quality metrics and the cross-entropy-method planner over
//! point-cloud or mesh candidates with a pluggable quality function.

pub mod candidates;
pub mod cem;
pub mod gmm;
pub mod quality;

pub use candidates::{cloud_from_depth, cloud_from_mesh, CandidateConstraints, SurfaceCloud};
pub use cem::{cem_plan, CemConfig, PlanResult};
pub use quality::{
    centroid_metric, fit_plane, planarity_centroid_metric, planarity_metric, MeshMetricEnv,
    MetricParams, QualityMetric,
};
