//! Rig JSON schema, version 1.
//!
//! ```json
//! {
//!   "rig_version": 1,
//!   "vertices": [[x, y, z], ...],
//!   "faces": [[i, j, k], ...],
//!   "bones": [{"id": 0, "parent": null,
//!              "bind_trs": {"translation": [..], "rotation_quat": [w, x, y, z], "scale": s},
//!              "offset_trs": {...} | "offset_matrix": [[row0], [row1], [row2], [row3]]}],
//!   "weights": [[[bone, weight], ...], ...],
//!   "clips": {"name": [{"bone": 1, "keys": [{"t": 0.0, "translation": [..],
//!                                           "rotation_quat": [..], "scale": 1.0}]}]}
//! }
//! ```
//!
//! Unknown fields are rejected. Face indices are 0-based; matrices are
//! row-major with the translation in the last column.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{Matrix4, Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use super::model::{Bone, Clip, Influences, RiggedModel, Skeleton, SkinBinding, TrsKey, MAX_INFLUENCES};
use super::trs::Trs;
use super::RigError;

pub const RIG_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RigDoc {
    rig_version: u32,
    vertices: Vec<[f64; 3]>,
    faces: Vec<[usize; 3]>,
    bones: Vec<BoneDoc>,
    weights: Vec<Vec<(u32, f64)>>,
    #[serde(default)]
    clips: BTreeMap<String, Vec<TrackDoc>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoneDoc {
    id: u32,
    parent: Option<u32>,
    bind_trs: TrsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset_trs: Option<TrsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    offset_matrix: Option<[[f64; 4]; 4]>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrsDoc {
    translation: [f64; 3],
    rotation_quat: [f64; 4],
    scale: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TrackDoc {
    bone: u32,
    keys: Vec<KeyDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KeyDoc {
    t: f64,
    translation: [f64; 3],
    rotation_quat: [f64; 4],
    scale: f64,
}

impl From<&TrsDoc> for Trs {
    fn from(d: &TrsDoc) -> Self {
        let [w, x, y, z] = d.rotation_quat;
        Trs::new(Vector3::from(d.translation), Quaternion::new(w, x, y, z), d.scale)
    }
}

impl From<&Trs> for TrsDoc {
    fn from(t: &Trs) -> Self {
        let q = t.rotation;
        TrsDoc {
            translation: t.translation.into(),
            rotation_quat: [q.w, q.i, q.j, q.k],
            scale: t.scale,
        }
    }
}

/// Parses and fully validates a rig document.
pub fn load_rig(document: &str) -> Result<RiggedModel, RigError> {
    let doc: RigDoc = serde_json::from_str(document)?;
    if doc.rig_version != RIG_VERSION {
        return Err(RigError::UnsupportedVersion(doc.rig_version));
    }

    let mesh = Mesh::new(
        doc.vertices.iter().map(|v| Vector3::from(*v)).collect(),
        doc.faces.clone(),
    );

    let mut bones = Vec::with_capacity(doc.bones.len());
    for b in &doc.bones {
        let ctx = || format!("bone {}", b.id);
        let offset = match (&b.offset_trs, &b.offset_matrix) {
            (Some(t), None) => Trs::from(t),
            (None, Some(m)) => {
                let rows: Vec<f64> = m.iter().flatten().copied().collect();
                Trs::from_matrix(&Matrix4::from_row_slice(&rows)).map_err(|e| e.in_context(ctx()))?
            }
            _ => {
                return Err(RigError::NonFinite(format!(
                    "{}: exactly one of offset_trs and offset_matrix is required",
                    ctx()
                )))
            }
        };
        bones.push(Bone {
            id: b.id,
            parent: b.parent,
            bind: Trs::from(&b.bind_trs),
            offset,
        });
    }
    if let Some(dup) = first_duplicate(doc.bones.iter().map(|b| b.id)) {
        return Err(RigError::BoneIdsNotDense { id: dup });
    }
    let skeleton = Skeleton::new(bones)?;

    let mut influences = Vec::with_capacity(doc.weights.len());
    for (v, list) in doc.weights.iter().enumerate() {
        if list.len() > MAX_INFLUENCES {
            return Err(RigError::TooManyInfluences {
                vertex: v,
                count: list.len(),
            });
        }
        influences.push(Influences::from_pairs(list)?);
    }

    let mut clips = BTreeMap::new();
    for (name, tracks) in &doc.clips {
        let mut clip = Clip::default();
        for track in tracks {
            let keys: Vec<TrsKey> = track
                .keys
                .iter()
                .map(|k| {
                    let [w, x, y, z] = k.rotation_quat;
                    TrsKey {
                        time: k.t,
                        trs: Trs::new(Vector3::from(k.translation), Quaternion::new(w, x, y, z), k.scale),
                    }
                })
                .collect();
            if clip.tracks.insert(track.bone, keys).is_some() {
                return Err(RigError::NonFinite(format!(
                    "clip '{name}' has two tracks for bone {}",
                    track.bone
                )));
            }
        }
        clips.insert(name.clone(), clip);
    }

    RiggedModel::new(mesh, skeleton, SkinBinding { influences }, clips)
}

pub fn load_rig_file(path: impl AsRef<Path>) -> Result<RiggedModel, RigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| RigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_rig(&text)
}

/// Serializes a model; offsets are always written as `offset_trs`.
pub fn to_json(model: &RiggedModel) -> String {
    let doc = RigDoc {
        rig_version: RIG_VERSION,
        vertices: model.mesh.vertices.iter().map(|v| [v.x, v.y, v.z]).collect(),
        faces: model.mesh.faces.clone(),
        bones: model
            .skeleton
            .bones()
            .iter()
            .map(|b| BoneDoc {
                id: b.id,
                parent: b.parent,
                bind_trs: TrsDoc::from(&b.bind),
                offset_trs: Some(TrsDoc::from(&b.offset)),
                offset_matrix: None,
            })
            .collect(),
        weights: model
            .binding
            .influences
            .iter()
            .map(|inf| inf.iter().map(|i| (i.bone, i.weight)).collect())
            .collect(),
        clips: model
            .clips
            .iter()
            .map(|(name, clip)| {
                let tracks = clip
                    .tracks
                    .iter()
                    .map(|(&bone, keys)| TrackDoc {
                        bone,
                        keys: keys
                            .iter()
                            .map(|k| {
                                let q = k.trs.rotation;
                                KeyDoc {
                                    t: k.time,
                                    translation: k.trs.translation.into(),
                                    rotation_quat: [q.w, q.i, q.j, q.k],
                                    scale: k.trs.scale,
                                }
                            })
                            .collect(),
                    })
                    .collect();
                (name.clone(), tracks)
            })
            .collect(),
    };
    serde_json::to_string(&doc).expect("rig documents always serialize")
}

fn first_duplicate(ids: impl Iterator<Item = u32>) -> Option<u32> {
    let mut seen = std::collections::HashSet::new();
    ids.into_iter().find(|id| !seen.insert(*id))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "rig_version": 1,
        "vertices": [[0,0,0],[1,0,0],[0,1,0]],
        "faces": [[0,1,2]],
        "bones": [{"id": 0, "parent": null,
                   "bind_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1},
                   "offset_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1}}],
        "weights": [[[0, 1.0]], [[0, 1.0]], [[0, 1.0]]]
    }"#;

    #[test]
    fn minimal_document() {
        let m = load_rig(MINIMAL).unwrap();
        assert_eq!(m.skeleton.len(), 1);
        assert_eq!(m.skeleton.bones()[0].offset, Trs::IDENTITY);
        assert_eq!(m.skeleton.bones()[0].offset_versor(), crate::algebra::Versor::IDENTITY);
        assert_eq!(load_rig(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn weight_sum_violation() {
        let doc = MINIMAL.replace("[[[0, 1.0]], [[0, 1.0]]", "[[[0, 0.6], [0, 0.6]], [[0, 1.0]]");
        // duplicate bone entry is caught before the sum
        assert!(matches!(load_rig(&doc), Err(RigError::DuplicateInfluence { vertex: 0, .. })));
        let two_bones = MINIMAL
            .replace(
                r#""offset_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1}}]"#,
                r#""offset_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1}},
                   {"id": 1, "parent": 0,
                    "bind_trs": {"translation": [1,0,0], "rotation_quat": [1,0,0,0], "scale": 1},
                    "offset_trs": {"translation": [-1,0,0], "rotation_quat": [1,0,0,0], "scale": 1}}]"#,
            )
            .replace("[[[0, 1.0]], [[0, 1.0]]", "[[[0, 0.6], [1, 0.6]], [[0, 1.0]]");
        match load_rig(&two_bones) {
            Err(RigError::WeightSumError { vertex, sum }) => {
                assert_eq!(vertex, 0);
                assert!((sum - 1.2).abs() < 1e-12);
            }
            other => panic!("expected WeightSumError, got {other:?}"),
        }
    }

    #[test]
    fn unknown_fields_and_versions() {
        let doc = MINIMAL.replace("\"rig_version\": 1,", "\"rig_version\": 1, \"extra\": 3,");
        assert!(matches!(load_rig(&doc), Err(RigError::Schema(_))));
        let doc = MINIMAL.replace("\"rig_version\": 1", "\"rig_version\": 2");
        assert!(matches!(load_rig(&doc), Err(RigError::UnsupportedVersion(2))));
    }

    #[test]
    fn offset_matrix_is_converted() {
        let doc = MINIMAL.replace(
            r#""offset_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1}"#,
            r#""offset_matrix": [[2,0,0,1],[0,2,0,2],[0,0,2,3],[0,0,0,1]]"#,
        );
        let m = load_rig(&doc).unwrap();
        let off = m.skeleton.bones()[0].offset;
        assert!((off.scale - 2.0).abs() < 1e-15);
        assert_eq!(off.translation, Vector3::new(1.0, 2.0, 3.0));
        let sheared = MINIMAL.replace(
            r#""offset_trs": {"translation": [0,0,0], "rotation_quat": [1,0,0,0], "scale": 1}"#,
            r#""offset_matrix": [[1,0.5,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]"#,
        );
        let err = load_rig(&sheared).unwrap_err();
        assert!(matches!(err.root_cause(), RigError::NonConformalMatrix(_)));
        assert!(err.to_string().contains("bone 0"));
    }

    #[test]
    fn hierarchy_errors() {
        let doc = MINIMAL.replace("\"parent\": null", "\"parent\": 0");
        assert!(matches!(load_rig(&doc), Err(RigError::NoRoot)));
    }
}
