//! Script schema, version 1.
//!
//! ```json
//! {"script_version": 1, "rig": "builtin:cylinders", "actions": [
//!   {"type": "set_keyframe", "clip": "main", "bone": 1, "time": 1.0,
//!    "delta": {"translation": [13, 0, 0], "axis": [0, 1, 1], "angle": 0.7, "scale": 0.5}},
//!   {"type": "sample", "clip": "main", "times": [0.0, 1.0]},
//!   {"type": "cut", "plane": {"normal": [1, 0, 0], "offset": 29.0}},
//!   {"type": "tear", "scalpel": [{"t": 0, "tip": [..], "tail": [..]}, ...], "delta": 0.4},
//!   {"type": "compare", "reference": "dq", "test": "cga", "pose": [{"bone": 1, "delta": {..}}]},
//!   {"type": "export", "name": "rest"},
//!   {"type": "bench", "repeats": 5}
//! ]}
//! ```
//!
//! A `delta` is applied in the bone's bind frame: the key stored is
//! `bind ∘ delta`. Rotations are given either as `axis` + `angle` (radians)
//! or as `rotation_quat` `[w, x, y, z]`; all fields are optional.

use anyhow::{bail, ensure, Context, Result};
use nalgebra::{Quaternion, Vector3};
use serde::{Deserialize, Serialize};

use cgarig::algebra::Plane;
use cgarig::anim::Backend;
use cgarig::rig::{BoneId, RiggedModel, Trs};
use cgarig::tear::ScalpelState;

pub const SCRIPT_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Script {
    pub script_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rig: Option<String>,
    #[serde(default)]
    pub actions: Vec<Action>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Delta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub translation: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_quat: Option<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl Delta {
    pub fn to_trs(&self) -> Result<Trs> {
        let rotation = match (self.axis, self.angle, self.rotation_quat) {
            (Some(_), _, Some(_)) | (_, Some(_), Some(_)) => {
                bail!("give either axis/angle or rotation_quat, not both")
            }
            (None, None, None) => Quaternion::identity(),
            (None, None, Some([w, x, y, z])) => Quaternion::new(w, x, y, z),
            (Some(axis), angle, None) => {
                let axis = Vector3::from(axis);
                ensure!(axis.norm() > 0.0, "rotation axis must be nonzero");
                Trs::from_axis_angle(axis, angle.unwrap_or(0.0)).rotation
            }
            (None, Some(_), None) => bail!("angle given without axis"),
        };
        let trs = Trs::new(
            Vector3::from(self.translation.unwrap_or([0.0; 3])),
            rotation,
            self.scale.unwrap_or(1.0),
        );
        trs.check()?;
        Ok(trs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PlaneSpec {
    pub normal: [f64; 3],
    pub offset: f64,
}

impl PlaneSpec {
    pub fn to_plane(&self) -> Result<Plane> {
        Ok(Plane::from_normal(Vector3::from(self.normal), self.offset)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScalpelSpec {
    pub t: f64,
    pub tip: [f64; 3],
    pub tail: [f64; 3],
}

impl From<&ScalpelSpec> for ScalpelState {
    fn from(s: &ScalpelSpec) -> Self {
        ScalpelState {
            time: s.t,
            tip: Vector3::from(s.tip),
            tail: Vector3::from(s.tail),
        }
    }
}

impl From<&ScalpelState> for ScalpelSpec {
    fn from(s: &ScalpelState) -> Self {
        ScalpelSpec {
            t: s.time,
            tip: s.tip.into(),
            tail: s.tail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoneDelta {
    pub bone: BoneId,
    pub delta: Delta,
}

fn default_clip() -> String {
    "main".to_string()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Action {
    SetKeyframe {
        #[serde(default = "default_clip")]
        clip: String,
        bone: BoneId,
        time: f64,
        /// Offset from the bind transform.
        #[serde(default)]
        delta: Delta,
        /// Absolute local transform; excludes `delta`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        trs: Option<Delta>,
    },
    Sample {
        #[serde(default = "default_clip")]
        clip: String,
        times: Vec<f64>,
    },
    Cut {
        plane: PlaneSpec,
    },
    Tear {
        /// Bundled script of the rig when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scalpel: Option<Vec<ScalpelSpec>>,
        /// Opening displacement; 1% of the bbox diagonal when omitted.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        delta: Option<f64>,
    },
    Compare {
        reference: String,
        test: String,
        #[serde(default)]
        pose: Vec<BoneDelta>,
    },
    Export {
        #[serde(default = "default_export_name")]
        name: String,
        /// Target directory, relative to the output directory.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dir: Option<String>,
    },
    Bench {
        #[serde(default = "default_repeats")]
        repeats: usize,
    },
}

fn default_export_name() -> String {
    "model".to_string()
}

fn default_repeats() -> usize {
    3
}

impl Action {
    pub fn kind(&self) -> &'static str {
        match self {
            Action::SetKeyframe { .. } => "set_keyframe",
            Action::Sample { .. } => "sample",
            Action::Cut { .. } => "cut",
            Action::Tear { .. } => "tear",
            Action::Compare { .. } => "compare",
            Action::Export { .. } => "export",
            Action::Bench { .. } => "bench",
        }
    }
}

pub fn parse_script(text: &str) -> Result<Script> {
    let script: Script = serde_json::from_str(text).context("malformed script")?;
    ensure!(
        script.script_version == SCRIPT_VERSION,
        "unsupported script_version {}",
        script.script_version
    );
    Ok(script)
}

fn check_bone(model: &RiggedModel, bone: BoneId) -> Result<()> {
    ensure!(model.skeleton.bone(bone).is_some(), "unknown bone {bone}");
    ensure!(bone != model.skeleton.root(), "bone {bone} is the root and cannot be animated");
    Ok(())
}

/// Checks every action against the loaded model before anything runs.
pub fn validate(script: &Script, model: &RiggedModel) -> Result<()> {
    for (i, action) in script.actions.iter().enumerate() {
        let ctx = || format!("action {i} ({})", action.kind());
        (|| -> Result<()> {
            match action {
                Action::SetKeyframe { bone, time, delta, trs, .. } => {
                    check_bone(model, *bone)?;
                    ensure!(time.is_finite(), "time must be finite");
                    delta.to_trs()?;
                    if let Some(trs) = trs {
                        ensure!(*delta == Delta::default(), "give either trs or delta, not both");
                        trs.to_trs()?;
                    }
                }
                Action::Sample { times, .. } => {
                    ensure!(times.iter().all(|t| t.is_finite()), "times must be finite");
                }
                Action::Cut { plane } => {
                    plane.to_plane()?;
                }
                Action::Tear { scalpel, delta } => {
                    if let Some(s) = scalpel {
                        ensure!(s.len() >= 2, "a tear needs at least two scalpel states");
                    }
                    if let Some(d) = delta {
                        ensure!(d.is_finite() && *d >= 0.0, "opening displacement must be >= 0");
                    }
                }
                Action::Compare { reference, test, pose } => {
                    reference.parse::<Backend>().map_err(anyhow::Error::msg)?;
                    test.parse::<Backend>().map_err(anyhow::Error::msg)?;
                    for bd in pose {
                        check_bone(model, bd.bone)?;
                        bd.delta.to_trs()?;
                    }
                }
                Action::Export { name, dir } => {
                    ensure!(
                        !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'),
                        "export name must be a plain file stem"
                    );
                    if let Some(dir) = dir {
                        let path = std::path::Path::new(dir);
                        ensure!(
                            !dir.is_empty()
                                && path.components().all(|c| matches!(c, std::path::Component::Normal(_))),
                            "export dir must be a relative path inside the output directory"
                        );
                    }
                }
                Action::Bench { repeats } => {
                    ensure!(*repeats > 0, "repeats must be positive");
                }
            }
            Ok(())
        })()
        .with_context(ctx)?;
    }
    Ok(())
}
