//! Procedural test rigs.
//!
//! Both fixtures are two-part limbs along +x: an upper part and a forearm,
//! each a stack of open cylindrical bands. Neighbouring bands carry their own
//! copy of the shared ring, so a band is a separate surface component. The
//! first band of the upper part and the last band of the forearm are closed
//! with a triangle fan around a centre vertex.
//!
//! Three bones: root at the origin, joint 1 (elbow) and joint 2 (wrist).
//! Weights blend with a smoothstep across a window centred on each joint:
//!
//! ```text
//! root   = 1 - s1
//! joint1 = s1 (1 - s2)
//! joint2 = s1 s2
//! ```

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::Vector3;

use super::mesh::{Mesh, Vec3};
use super::model::{Bone, Influence, Influences, RiggedModel, Skeleton, SkinBinding};
use super::trs::Trs;

pub const ROOT: u32 = 0;
pub const ELBOW: u32 = 1;
pub const WRIST: u32 = 2;

/// One cylindrical part: `bands[i]` row intervals per band, spread
/// uniformly over `[x0, x1]`.
struct Part {
    segments: usize,
    x0: f64,
    x1: f64,
    bands: &'static [usize],
    radius: fn(f64) -> f64,
}

struct Limb {
    upper: Part,
    forearm: Part,
    elbow: f64,
    wrist: f64,
    elbow_window: (f64, f64),
    wrist_window: (f64, f64),
}

fn smoothstep(lo: f64, hi: f64, x: f64) -> f64 {
    let t = ((x - lo) / (hi - lo)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

impl Limb {
    fn influences(&self, x: f64) -> Influences {
        let s1 = smoothstep(self.elbow_window.0, self.elbow_window.1, x);
        let s2 = smoothstep(self.wrist_window.0, self.wrist_window.1, x);
        [(ROOT, 1.0 - s1), (ELBOW, s1 * (1.0 - s2)), (WRIST, s1 * s2)]
            .into_iter()
            .filter(|&(_, w)| w > 0.0)
            .map(|(bone, weight)| Influence { bone, weight })
            .collect()
    }

    fn build(&self) -> RiggedModel {
        let mut vertices: Vec<Vec3> = Vec::new();
        let mut faces: Vec<[usize; 3]> = Vec::new();
        let mut first_ring = 0;
        let mut last_ring = 0;

        for (p, part) in [&self.upper, &self.forearm].into_iter().enumerate() {
            let n = part.segments;
            let total: usize = part.bands.iter().sum();
            let dx = (part.x1 - part.x0) / total as f64;
            let mut row = 0;
            for (b, &intervals) in part.bands.iter().enumerate() {
                let base = vertices.len();
                for i in 0..=intervals {
                    let x = part.x0 + (row + i) as f64 * dx;
                    let r = (part.radius)(x);
                    for j in 0..n {
                        let phi = TAU * j as f64 / n as f64;
                        vertices.push(Vector3::new(x, r * phi.cos(), r * phi.sin()));
                    }
                }
                let at = |i: usize, j: usize| base + i * n + j % n;
                for i in 0..intervals {
                    for j in 0..n {
                        faces.push([at(i, j), at(i, j + 1), at(i + 1, j + 1)]);
                        faces.push([at(i, j), at(i + 1, j + 1), at(i + 1, j)]);
                    }
                }
                if p == 0 && b == 0 {
                    first_ring = base;
                }
                if p == 1 && b + 1 == part.bands.len() {
                    last_ring = base + intervals * n;
                }
                row += intervals;
            }
        }

        let start = vertices.len();
        vertices.push(Vector3::new(self.upper.x0, 0.0, 0.0));
        let n = self.upper.segments;
        for j in 0..n {
            faces.push([start, first_ring + (j + 1) % n, first_ring + j]);
        }
        let end = vertices.len();
        vertices.push(Vector3::new(self.forearm.x1, 0.0, 0.0));
        let n = self.forearm.segments;
        for j in 0..n {
            faces.push([end, last_ring + j, last_ring + (j + 1) % n]);
        }

        let influences = vertices.iter().map(|v| self.influences(v.x)).collect();
        let bone = |id, parent, x: f64, global_x: f64| Bone {
            id,
            parent,
            bind: Trs::from_translation(Vector3::new(x, 0.0, 0.0)),
            offset: Trs::from_translation(Vector3::new(-global_x, 0.0, 0.0)),
        };
        let skeleton = Skeleton::new(vec![
            bone(ROOT, None, 0.0, 0.0),
            bone(ELBOW, Some(ROOT), self.elbow, self.elbow),
            bone(WRIST, Some(ELBOW), self.wrist - self.elbow, self.wrist),
        ])
        .expect("fixture skeleton is valid");
        RiggedModel::new(
            Mesh::new(vertices, faces),
            skeleton,
            SkinBinding { influences },
            BTreeMap::new(),
        )
        .expect("fixture rig is valid")
    }
}

/// The "cylinders" rig: 634 vertices, 758 faces, 3 bones.
pub fn cylinders() -> RiggedModel {
    Limb {
        upper: Part {
            segments: 22,
            x0: 0.0,
            x1: 20.0,
            bands: &[2, 1, 1, 1, 1, 1, 2],
            radius: |_| 3.0,
        },
        forearm: Part {
            segments: 20,
            x0: 20.0,
            x1: 40.0,
            bands: &[2, 1, 1, 1, 1, 2],
            radius: |_| 2.5,
        },
        elbow: 20.0,
        wrist: 32.0,
        elbow_window: (16.0, 24.0),
        wrist_window: (30.0, 34.0),
    }
    .build()
}

/// The arm-scale rig: 3069 vertices, 5037 faces, 3 bones.
pub fn arm() -> RiggedModel {
    Limb {
        upper: Part {
            segments: 50,
            x0: 0.0,
            x1: 30.0,
            bands: &[2, 2, 2, 2, 2, 2, 2, 2, 2, 1],
            radius: |x| 4.2 - 0.8 * (x / 30.0) + 0.5 * (std::f64::consts::PI * x / 30.0).sin(),
        },
        forearm: Part {
            segments: 49,
            x0: 30.0,
            x1: 56.0,
            bands: &[15, 16],
            radius: |x| {
                let t = (x - 30.0) / 26.0;
                3.4 - 1.6 * t + 0.4 * (std::f64::consts::PI * t).sin()
            },
        },
        elbow: 30.0,
        wrist: 50.0,
        elbow_window: (26.0, 34.0),
        wrist_window: (48.0, 52.0),
    }
    .build()
}

/// Every bundled fixture by name.
pub fn make_test_models() -> Vec<(&'static str, RiggedModel)> {
    vec![("cylinders", cylinders()), ("arm", arm())]
}
