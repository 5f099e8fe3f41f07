use std::collections::BTreeMap;

use arrayvec::ArrayVec;

use crate::algebra::Versor;

use super::mesh::Mesh;
use super::trs::Trs;
use super::RigError;

pub type BoneId = u32;

/// Maximum bones influencing one vertex.
pub const MAX_INFLUENCES: usize = 4;

/// Per-vertex weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Influence {
    pub bone: BoneId,
    pub weight: f64,
}

/// Up to four bone influences of one vertex, kept sorted by bone id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Influences(ArrayVec<Influence, MAX_INFLUENCES>);

impl Influences {
    pub fn single(bone: BoneId) -> Self {
        let mut v = ArrayVec::new();
        v.push(Influence { bone, weight: 1.0 });
        Self(v)
    }

    /// Builds from `(bone, weight)` pairs, sorting by bone id.
    pub fn from_pairs(pairs: &[(BoneId, f64)]) -> Result<Self, RigError> {
        if pairs.len() > MAX_INFLUENCES {
            return Err(RigError::TooManyInfluences {
                vertex: usize::MAX,
                count: pairs.len(),
            });
        }
        let mut v: ArrayVec<Influence, MAX_INFLUENCES> = pairs
            .iter()
            .map(|&(bone, weight)| Influence { bone, weight })
            .collect();
        v.sort_by_key(|i| i.bone);
        Ok(Self(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Influence> + '_ {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Influence] {
        &self.0
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().map(|i| i.weight).sum()
    }

    pub fn weight_of(&self, bone: BoneId) -> f64 {
        self.0.iter().find(|i| i.bone == bone).map_or(0.0, |i| i.weight)
    }

    /// Checks the invariants for vertex `vertex` against `bone_count` bones.
    pub fn check(&self, vertex: usize, bone_count: usize) -> Result<(), RigError> {
        if self.0.is_empty() {
            return Err(RigError::NoInfluences { vertex });
        }
        for (k, inf) in self.0.iter().enumerate() {
            if inf.bone as usize >= bone_count {
                return Err(RigError::UnknownBone {
                    context: format!("weights of vertex {vertex}"),
                    bone: inf.bone,
                });
            }
            if k > 0 && self.0[k - 1].bone == inf.bone {
                return Err(RigError::DuplicateInfluence {
                    vertex,
                    bone: inf.bone,
                });
            }
            if !(inf.weight >= 0.0) || !inf.weight.is_finite() {
                return Err(RigError::NegativeWeight {
                    vertex,
                    weight: inf.weight,
                });
            }
        }
        let s = self.sum();
        if !((s - 1.0).abs() <= WEIGHT_SUM_TOLERANCE) {
            return Err(RigError::WeightSumError { vertex, sum: s });
        }
        Ok(())
    }
}

impl FromIterator<Influence> for Influences {
    /// Takes at most four entries and sorts them by bone id.
    fn from_iter<I: IntoIterator<Item = Influence>>(iter: I) -> Self {
        let mut v: ArrayVec<Influence, MAX_INFLUENCES> = iter.into_iter().take(MAX_INFLUENCES).collect();
        v.sort_by_key(|i| i.bone);
        Self(v)
    }
}

/// Per-vertex influence lists, parallel to the mesh vertices.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SkinBinding {
    pub influences: Vec<Influences>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bone {
    pub id: BoneId,
    pub parent: Option<BoneId>,
    /// Bind-pose local transform relative to the parent (`t_i`).
    pub bind: Trs,
    /// Inverse bind transform relative to the root (`O_i` / `B_i`).
    pub offset: Trs,
}

impl Bone {
    pub fn offset_versor(&self) -> Versor {
        self.offset.to_versor()
    }
}

/// Bones indexed by id, plus a parent-before-child evaluation order.
#[derive(Clone, Debug, PartialEq)]
pub struct Skeleton {
    bones: Vec<Bone>,
    order: Vec<usize>,
    root: usize,
}

impl Skeleton {
    /// Bone ids must be exactly `0..n`; the parent links must form one tree.
    pub fn new(mut bones: Vec<Bone>) -> Result<Self, RigError> {
        if bones.is_empty() {
            return Err(RigError::NoRoot);
        }
        bones.sort_by_key(|b| b.id);
        for (i, b) in bones.iter().enumerate() {
            if b.id as usize != i {
                return Err(RigError::BoneIdsNotDense { id: b.id });
            }
        }
        let n = bones.len();
        let mut root = None;
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
        for b in &bones {
            match b.parent {
                None => {
                    if let Some(r) = root {
                        return Err(RigError::MultipleRoots { first: r as BoneId, second: b.id });
                    }
                    root = Some(b.id as usize);
                }
                Some(p) => {
                    if p as usize >= n {
                        return Err(RigError::UnknownBone {
                            context: format!("parent of bone {}", b.id),
                            bone: p,
                        });
                    }
                    children[p as usize].push(b.id as usize);
                }
            }
        }
        let root = root.ok_or(RigError::NoRoot)?;
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        while let Some(b) = stack.pop() {
            order.push(b);
            for &c in children[b].iter().rev() {
                stack.push(c);
            }
        }
        if order.len() != n {
            let reached: std::collections::HashSet<usize> = order.iter().copied().collect();
            let bone = (0..n).find(|i| !reached.contains(i)).unwrap_or(0);
            return Err(RigError::Cycle { bone: bone as BoneId });
        }
        let r = &bones[root].bind;
        if r.translation.norm() > 1e-9 || (r.rotation.w.abs() - 1.0).abs() > 1e-9 || (r.scale - 1.0).abs() > 1e-9 {
            return Err(RigError::RootNotIdentity);
        }
        for b in &bones {
            b.bind.check().map_err(|e| e.in_context(format!("bind_trs of bone {}", b.id)))?;
            b.offset.check().map_err(|e| e.in_context(format!("offset of bone {}", b.id)))?;
        }
        Ok(Self { bones, order, root })
    }

    pub fn bones(&self) -> &[Bone] {
        &self.bones
    }

    pub fn bone(&self, id: BoneId) -> Option<&Bone> {
        self.bones.get(id as usize)
    }

    pub fn len(&self) -> usize {
        self.bones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bones.is_empty()
    }

    /// Parent-before-child traversal order.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn root(&self) -> BoneId {
        self.root as BoneId
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrsKey {
    pub time: f64,
    pub trs: Trs,
}

/// Keyframe tracks of one animation, keyed by bone id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Clip {
    pub tracks: BTreeMap<BoneId, Vec<TrsKey>>,
}

impl Clip {
    pub fn track(&self, bone: BoneId) -> Option<&[TrsKey]> {
        self.tracks.get(&bone).map(|v| v.as_slice())
    }

    pub fn key_count(&self) -> usize {
        self.tracks.values().map(|v| v.len()).sum()
    }

    /// Time span covered by all tracks.
    pub fn time_range(&self) -> Option<(f64, f64)> {
        let mut range: Option<(f64, f64)> = None;
        for keys in self.tracks.values() {
            if let (Some(a), Some(b)) = (keys.first(), keys.last()) {
                range = Some(match range {
                    None => (a.time, b.time),
                    Some((lo, hi)) => (lo.min(a.time), hi.max(b.time)),
                });
            }
        }
        range
    }
}

/// Mesh, skeleton, skin binding and animation clips.
#[derive(Clone, Debug, PartialEq)]
pub struct RiggedModel {
    pub mesh: Mesh,
    pub skeleton: Skeleton,
    pub binding: SkinBinding,
    pub clips: BTreeMap<String, Clip>,
    /// Always the identity; kept to mirror the matrix pipeline's `G`.
    pub global_inverse: Versor,
}

impl RiggedModel {
    pub fn new(
        mesh: Mesh,
        skeleton: Skeleton,
        binding: SkinBinding,
        clips: BTreeMap<String, Clip>,
    ) -> Result<Self, RigError> {
        let model = Self {
            mesh,
            skeleton,
            binding,
            clips,
            global_inverse: Versor::IDENTITY,
        };
        model.validate()?;
        Ok(model)
    }

    /// Full load-time validation of mesh, binding and clips.
    pub fn validate(&self) -> Result<(), RigError> {
        self.mesh.validate()?;
        let n = self.mesh.vertex_count();
        if self.binding.influences.len() != n {
            return Err(RigError::WeightCountMismatch {
                vertices: n,
                weights: self.binding.influences.len(),
            });
        }
        for (v, inf) in self.binding.influences.iter().enumerate() {
            inf.check(v, self.skeleton.len())?;
        }
        if self.global_inverse != Versor::IDENTITY {
            return Err(RigError::NonFinite("global_inverse must be the identity".into()));
        }
        for (name, clip) in &self.clips {
            for (&bone, keys) in &clip.tracks {
                let ctx = || format!("clip '{name}', bone {bone}");
                if self.skeleton.bone(bone).is_none() {
                    return Err(RigError::UnknownBone { context: ctx(), bone });
                }
                if bone == self.skeleton.root() {
                    return Err(RigError::RootAnimated { clip: name.clone() });
                }
                if keys.is_empty() {
                    return Err(RigError::EmptyTrack { clip: name.clone(), bone });
                }
                for (k, key) in keys.iter().enumerate() {
                    if !key.time.is_finite() {
                        return Err(RigError::NonFinite(ctx()));
                    }
                    key.trs.check().map_err(|e| e.in_context(ctx()))?;
                    if k > 0 && !(keys[k - 1].time < key.time) {
                        return Err(RigError::UnsortedKeys { clip: name.clone(), bone });
                    }
                }
            }
        }
        Ok(())
    }

    /// Same skeleton and clips on a different mesh and binding.
    pub fn with_mesh(&self, mesh: Mesh, binding: SkinBinding) -> Self {
        Self {
            mesh,
            skeleton: self.skeleton.clone(),
            binding,
            clips: self.clips.clone(),
            global_inverse: self.global_inverse,
        }
    }
}
