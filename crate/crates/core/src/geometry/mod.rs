//! Triangle-mesh representation, spatial queries, rigid transforms and
//! stable-pose computation. Everything here is immutable after construction
//! and safe for concurrent reads.

pub mod bvh;
pub mod hull;
pub mod io;
pub mod mesh;
pub mod primitives;
pub mod sample;
pub mod stable;
pub mod transform;

pub use bvh::{Bvh, RayHit};
pub use hull::ConvexHull;
pub use io::{load_mesh, MeshFormat};
pub use mesh::Mesh;
pub use sample::{sample_surface, SuctionGrasp};
pub use stable::{stable_poses, StablePose};
pub use transform::{skew, AdjointMap, RigidTransform};
