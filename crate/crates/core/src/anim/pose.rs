use nalgebra::Matrix4;

use crate::algebra::Versor;
use crate::rig::{Clip, RiggedModel, Skeleton, Trs};

use super::interp::local_transform_at;

/// Global bone transforms at one time, in three equivalent forms that are
/// all built by the same parent-before-child traversal.
#[derive(Clone, Debug, PartialEq)]
pub struct Pose {
    pub time: f64,
    /// `M_n`, indexed by bone id.
    pub versors: Vec<Versor>,
    /// `T_n`, indexed by bone id.
    pub matrices: Vec<Matrix4<f64>>,
    pub globals: Vec<Trs>,
}

impl Pose {
    /// Propagates local transforms (indexed by bone id) down the tree.
    pub fn from_locals(skeleton: &Skeleton, locals: &[Trs], time: f64) -> Self {
        let n = skeleton.len();
        let mut versors = vec![Versor::IDENTITY; n];
        let mut matrices = vec![Matrix4::identity(); n];
        let mut globals = vec![Trs::IDENTITY; n];
        for &b in skeleton.order() {
            let bone = &skeleton.bones()[b];
            let local = &locals[b];
            match bone.parent {
                None => {}
                Some(p) => {
                    let p = p as usize;
                    versors[b] = versors[p].compose(&local.to_versor());
                    matrices[b] = matrices[p] * local.to_matrix();
                    globals[b] = globals[p].compose(local);
                }
            }
        }
        Self {
            time,
            versors,
            matrices,
            globals,
        }
    }

    pub fn bind(skeleton: &Skeleton) -> Self {
        let locals: Vec<Trs> = skeleton.bones().iter().map(|b| b.bind).collect();
        Self::from_locals(skeleton, &locals, 0.0)
    }

    /// Bind pose with `delta` applied in the local frame of each listed bone.
    pub fn articulated(skeleton: &Skeleton, deltas: &[(u32, Trs)]) -> Self {
        let mut locals: Vec<Trs> = skeleton.bones().iter().map(|b| b.bind).collect();
        for &(bone, delta) in deltas {
            locals[bone as usize] = locals[bone as usize].compose(&delta);
        }
        Self::from_locals(skeleton, &locals, 0.0)
    }
}

/// Evaluates every bone of `clip` at time `k`. The root stays at the
/// identity.
pub fn global_pose_at(model: &RiggedModel, clip: &Clip, k: f64) -> Pose {
    let locals: Vec<Trs> = model
        .skeleton
        .bones()
        .iter()
        .map(|b| local_transform_at(b, clip, k))
        .collect();
    Pose::from_locals(&model.skeleton, &locals, k)
}
