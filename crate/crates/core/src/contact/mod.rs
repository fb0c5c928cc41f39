//! Suction-ring and soft-finger contact models, grasp map assembly, and
//! QP-based wrench resistance. All types are immutable after construction and
//! `wrench_resistance` is pure and reentrant.

pub mod models;
pub mod qp;
pub mod resistance;

pub use models::{
    contact_frame, contact_frame_with_ref, ConstraintSet, RingContactModel, SoftFingerModel,
    WrenchBasis,
};
pub use resistance::{
    soft_finger_resistance, wrench_resistance, GraspMap, ResistanceResult, WrenchMetric,
    RESISTANCE_TOL,
};
