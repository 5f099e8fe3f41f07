use nalgebra::Quaternion;

use crate::rig::{Bone, BoneId, Clip, RiggedModel, Trs, TrsKey};

use super::AnimError;

/// Normalized linear quaternion blend; `q2` is negated first when the two
/// lie in opposite hemispheres.
pub fn nlerp(q1: &Quaternion<f64>, q2: &Quaternion<f64>, a: f64) -> Quaternion<f64> {
    let q2 = if q1.dot(q2) < 0.0 { -*q2 } else { *q2 };
    let q = q1 * (1.0 - a) + q2 * a;
    q / q.norm()
}

/// Interpolates a time-sorted track. Times outside the key range clamp to
/// the nearest key; a time equal to a key time returns that key unchanged.
pub fn sample_track(keys: &[TrsKey], k: f64) -> Option<Trs> {
    let first = keys.first()?;
    let last = keys.last()?;
    if !(k > first.time) {
        return Some(first.trs);
    }
    if k >= last.time {
        return Some(last.trs);
    }
    let hi = keys.partition_point(|key| key.time <= k);
    let (k0, k1) = (&keys[hi - 1], &keys[hi]);
    if k0.time == k {
        return Some(k0.trs);
    }
    let a = (k - k0.time) / (k1.time - k0.time);
    let (t0, t1) = (&k0.trs, &k1.trs);
    Some(Trs::new(
        t0.translation * (1.0 - a) + t1.translation * a,
        nlerp(&t0.rotation, &t1.rotation, a),
        t0.scale * (1.0 - a) + t1.scale * a,
    ))
}

/// Local transform of `bone` at time `k`; the bind transform if the clip
/// has no track for it.
pub fn local_transform_at(bone: &Bone, clip: &Clip, k: f64) -> Trs {
    clip.track(bone.id)
        .and_then(|keys| sample_track(keys, k))
        .unwrap_or(bone.bind)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KeyInsert {
    Inserted,
    /// A key already existed at that time and was replaced.
    Overwritten,
}

/// Inserts or replaces a key, keeping the track sorted. Creates the clip if
/// it does not exist yet.
pub fn generate_keyframe(
    model: &mut RiggedModel,
    clip: &str,
    bone: BoneId,
    trs: Trs,
    time: f64,
) -> Result<KeyInsert, AnimError> {
    if model.skeleton.bone(bone).is_none() {
        return Err(AnimError::UnknownBone(bone));
    }
    if bone == model.skeleton.root() {
        return Err(AnimError::RootAnimated);
    }
    if !time.is_finite() {
        return Err(AnimError::InvalidKey(format!("time {time}")));
    }
    trs.check().map_err(|e| AnimError::InvalidKey(e.to_string()))?;
    let keys = model
        .clips
        .entry(clip.to_string())
        .or_default()
        .tracks
        .entry(bone)
        .or_default();
    let at = keys.partition_point(|key| key.time < time);
    let key = TrsKey { time, trs };
    if at < keys.len() && keys[at].time == time {
        keys[at] = key;
        Ok(KeyInsert::Overwritten)
    } else {
        keys.insert(at, key);
        Ok(KeyInsert::Inserted)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector3;

    fn key(time: f64, trs: Trs) -> TrsKey {
        TrsKey { time, trs }
    }

    #[test]
    fn exact_and_clamped() {
        let a = Trs::from_translation(Vector3::new(0.3, 0.1, 0.7));
        let b = Trs::from_axis_angle(Vector3::new(1.0, 2.0, 3.0), 1.1);
        let c = Trs::from_scale(2.0);
        let keys = [key(0.0, a), key(1.0 / 3.0, b), key(2.0, c)];
        assert_eq!(sample_track(&keys, 1.0 / 3.0), Some(b));
        assert_eq!(sample_track(&keys, -5.0), Some(a));
        assert_eq!(sample_track(&keys, 9.0), Some(c));
        assert_eq!(sample_track(&keys, 2.0), Some(c));
        assert_eq!(sample_track(&[], 0.0), None);
    }

    #[test]
    fn midpoint_translation() {
        let keys = [
            key(0.0, Trs::IDENTITY),
            key(1.0, Trs::from_translation(Vector3::new(2.0, 0.0, 0.0))),
        ];
        let mid = sample_track(&keys, 0.5).unwrap();
        assert_eq!(mid, Trs::from_translation(Vector3::new(1.0, 0.0, 0.0)));
    }

    #[test]
    fn midpoint_rotation_halves_angle() {
        let theta = 1.3;
        let keys = [key(0.0, Trs::IDENTITY), key(1.0, Trs::from_axis_angle(Vector3::z(), theta))];
        let mid = sample_track(&keys, 0.5).unwrap();
        let oracle = Trs::from_axis_angle(Vector3::z(), theta / 2.0);
        assert!((mid.rotation - oracle.rotation).norm() < 1e-15);
    }

    #[test]
    fn hemisphere_correction() {
        let q = Trs::from_axis_angle(Vector3::x(), 0.4).rotation;
        let r = nlerp(&q, &-q, 0.5);
        assert!((r - q).norm() < 1e-15);
    }
}
