//! Keyframe interpolation, bone hierarchy evaluation and skinning.
//!
//! Three backends share one [`Pose`]: `Cga` sandwiches conformal points with
//! `M_n B_n`, `Lbs` multiplies homogeneous matrices `T_n O_n`, and `Dq`
//! blends unit dual quaternions. Poses carry versor, matrix and TRS forms of
//! every global bone transform.

mod compare;
mod interp;
mod pose;
mod skin;

use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::exec::Exec;
use crate::rig::{BoneId, RiggedModel};

pub use compare::{compare_frames, ErrorReport};
pub use interp::{generate_keyframe, local_transform_at, nlerp, sample_track, KeyInsert};
pub use pose::{global_pose_at, Pose};
pub use skin::{skin, skin_cga, skin_dq, skin_lbs, Backend, CgaMode, SkinnedFrame};

#[derive(Debug, Error)]
pub enum AnimError {
    #[error("unknown bone {0}")]
    UnknownBone(BoneId),
    #[error("unknown clip '{0}'")]
    UnknownClip(String),
    #[error("the root bone cannot be animated")]
    RootAnimated,
    #[error("invalid key: {0}")]
    InvalidKey(String),
    #[error("{backend:?} skinning produced a non-finite position at vertex {vertex}")]
    NumericalFailure { vertex: usize, backend: Backend },
    #[error("algebra failure{}: {source}", vertex.map(|v| format!(" at vertex {v}")).unwrap_or_default())]
    Algebra {
        vertex: Option<usize>,
        #[source]
        source: AlgebraError,
    },
    #[error("frames have {0} and {1} vertices")]
    FrameMismatch(usize, usize),
}

impl From<AlgebraError> for AnimError {
    fn from(source: AlgebraError) -> Self {
        AnimError::Algebra { vertex: None, source }
    }
}

/// Skins `pose` with two backends and compares them, relative to the rest
/// mesh's bounding-box diagonal.
pub fn compare_backends(
    model: &RiggedModel,
    pose: &Pose,
    reference: Backend,
    test: Backend,
    exec: Exec,
) -> Result<ErrorReport, AnimError> {
    let a = skin(model, pose, reference, exec)?;
    let b = skin(model, pose, test, exec)?;
    compare_frames(&a, &b, model.mesh.bbox_diagonal())
}
