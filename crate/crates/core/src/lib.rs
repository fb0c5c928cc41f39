//! Suction grasp analysis on rigid, non-porous triangle meshes.
//!
//! The library evaluates a suction grasp `u = (p, v)`, a target point on the
//! object surface plus an approach direction, in three stages:
//!
//! 1. **Seal formation** ([`seal`]): a quasi-static conical spring model of the
//!    cup is projected onto the mesh; the grasp seals if no spring stretches
//!    beyond its strain limit and the ring covers no holes.
//! 2. **Wrench resistance** ([`contact`]): a contact wrench basis with linear
//!    constraints on its magnitudes; a grasp resists a wrench `w` iff the
//!    residual of a small convex QP is zero.
//! 3. **Robustness** ([`robustness`]): Monte-Carlo sampling of pose, grasp,
//!    friction and wrench perturbations yields the probability `lambda` that
//!    both tests pass.
//!
//! On top of these, [`sensor`] renders noisy depth images, [`metrics`] provides
//! baseline grasp-quality metrics and a cross-entropy-method planner, and
//! [`dataset`] generates labeled thumbnail datasets for downstream learning.

pub mod config;
pub mod contact;
pub mod dataset;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod robustness;
pub mod seal;
pub mod sensor;
pub mod stats;

pub use config::RunConfig;
pub use contact::{
    ConstraintSet, GraspMap, ResistanceResult, RingContactModel, SoftFingerModel, WrenchBasis,
};
pub use error::{Error, Result};
pub use geometry::{AdjointMap, Mesh, RigidTransform, StablePose, SuctionGrasp};
pub use robustness::{PerturbationSpec, RobustnessResult};
pub use seal::{CupModel, CupState, SealFailure, SealParams, SealResult};
pub use sensor::{CameraIntrinsics, DepthImage, GraspThumbnail};
