//! Rigged mesh data model, JSON rig ingestion, OBJ export and fixtures.

pub mod fixtures;
mod json;
mod mesh;
mod model;
mod obj;
mod trs;

use thiserror::Error;

pub use json::{load_rig, load_rig_file, to_json, RIG_VERSION};
pub use mesh::{edge_key, ComponentTopology, EdgeFaces, Mesh, MeshError, Vec3};
pub use model::{
    Bone, BoneId, Clip, Influence, Influences, RiggedModel, Skeleton, SkinBinding, TrsKey,
    MAX_INFLUENCES, WEIGHT_SUM_TOLERANCE,
};
pub use obj::{export_obj, export_obj_sequence, write_obj};
pub use trs::{matrix_to_versor, Trs};

#[derive(Debug, Error)]
pub enum RigError {
    #[error("malformed rig document: {0}")]
    Schema(#[from] serde_json::Error),
    #[error("unsupported rig_version {0}")]
    UnsupportedVersion(u32),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("{vertices} vertices but {weights} weight lists")]
    WeightCountMismatch { vertices: usize, weights: usize },
    #[error("vertex {vertex} has no influences")]
    NoInfluences { vertex: usize },
    #[error("vertex {vertex} has {count} influences, at most 4 are allowed")]
    TooManyInfluences { vertex: usize, count: usize },
    #[error("vertex {vertex} lists bone {bone} twice")]
    DuplicateInfluence { vertex: usize, bone: BoneId },
    #[error("vertex {vertex} has invalid weight {weight}")]
    NegativeWeight { vertex: usize, weight: f64 },
    #[error("weights of vertex {vertex} sum to {sum}, expected 1")]
    WeightSumError { vertex: usize, sum: f64 },
    #[error("{context} references unknown bone {bone}")]
    UnknownBone { context: String, bone: BoneId },
    #[error("bone ids must be 0..n without gaps or repeats (offending id {id})")]
    BoneIdsNotDense { id: BoneId },
    #[error("bones {first} and {second} both have no parent")]
    MultipleRoots { first: BoneId, second: BoneId },
    #[error("skeleton has no root bone")]
    NoRoot,
    #[error("bone {bone} is not reachable from the root (cycle in parent links)")]
    Cycle { bone: BoneId },
    #[error("the root bone's bind transform must be the identity")]
    RootNotIdentity,
    #[error("clip '{clip}' animates the root bone, whose global transform is fixed to the identity")]
    RootAnimated { clip: String },
    #[error("clip '{clip}' has an empty track for bone {bone}")]
    EmptyTrack { clip: String, bone: BoneId },
    #[error("clip '{clip}', bone {bone}: key times must be strictly increasing")]
    UnsortedKeys { clip: String, bone: BoneId },
    #[error("rotation quaternion has norm {0}, expected 1")]
    NonUnitQuaternion(f64),
    #[error("scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("matrix is not translation·rotation·uniform-scale: {0}")]
    NonConformalMatrix(String),
    #[error("non-finite or invalid value in {0}")]
    NonFinite(String),
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<RigError>,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl RigError {
    pub fn in_context(self, context: impl Into<String>) -> Self {
        RigError::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root_cause(&self) -> &RigError {
        match self {
            RigError::Context { source, .. } => source.root_cause(),
            e => e,
        }
    }
}
