use cgarig::anim::{
    compare_backends, compare_frames, generate_keyframe, global_pose_at, skin, skin_cga, Backend, CgaMode, Pose,
};
use cgarig::exec::Exec;
use cgarig::rig::fixtures::{self, ELBOW, WRIST};
use cgarig::rig::{Influences, SkinBinding, Trs};
use nalgebra::{Quaternion, Vector3};
use proptest::prelude::*;

fn rot(axis: [f64; 3], angle: f64) -> Trs {
    Trs::from_axis_angle(Vector3::from(axis), angle)
}

#[test]
fn bind_pose_is_a_fixed_point() {
    for (name, model) in fixtures::make_test_models() {
        let pose = Pose::bind(&model.skeleton);
        for backend in Backend::ALL {
            let frame = skin(&model, &pose, backend, Exec::Parallel).unwrap();
            for (a, b) in frame.positions.iter().zip(&model.mesh.vertices) {
                assert!((a - b).norm() <= 1e-9, "{name} {backend:?}");
            }
        }
    }
}

#[test]
fn single_influence_backends_agree_with_the_bone_transform() {
    let delta = Trs::new(
        Vector3::new(2.0, -1.0, 0.5),
        Quaternion::new(0.9, 0.1, 0.3, -0.2).normalize(),
        1.0,
    );
    for (name, model) in fixtures::make_test_models() {
        let rigid = model.with_mesh(
            model.mesh.clone(),
            SkinBinding {
                influences: vec![Influences::single(ELBOW); model.mesh.vertex_count()],
            },
        );
        let pose = Pose::articulated(&rigid.skeleton, &[(ELBOW, delta)]);
        let bone = rigid.skeleton.bone(ELBOW).unwrap();
        let full = pose.globals[ELBOW as usize].compose(&bone.offset);
        for backend in Backend::ALL {
            let frame = skin(&rigid, &pose, backend, Exec::Parallel).unwrap();
            for (p, v) in frame.positions.iter().zip(&rigid.mesh.vertices) {
                let expected = full.transform_point(v);
                assert!((p - expected).norm() <= 1e-9 * (1.0 + expected.norm()), "{name} {backend:?}");
            }
        }
    }
}

#[test]
fn cga_per_term_projection_equals_lbs() {
    let model = fixtures::arm();
    let pose = Pose::articulated(
        &model.skeleton,
        &[
            (ELBOW, Trs::new(Vector3::new(1.0, 2.0, 0.0), rot([0.0, 1.0, 1.0], 0.9).rotation, 1.3)),
            (WRIST, rot([1.0, 0.0, 0.0], -0.5)),
        ],
    );
    let r = compare_backends(&model, &pose, Backend::Lbs, Backend::Cga, Exec::Parallel).unwrap();
    assert!(r.linf <= 1e-12, "{r:?}");
}

#[test]
fn sum_then_project_differs_only_under_scale() {
    let model = fixtures::cylinders();
    let rigid = Pose::articulated(&model.skeleton, &[(ELBOW, rot([0.0, 1.0, 1.0], 0.7))]);
    let a = skin_cga(&model, &rigid, CgaMode::ProjectEachTerm, Exec::Parallel).unwrap();
    let b = skin_cga(&model, &rigid, CgaMode::SumThenProject, Exec::Parallel).unwrap();
    assert!(compare_frames(&a, &b, 1.0).unwrap().linf <= 1e-9);
}

#[test]
fn backend_error_bounds() {
    let model = fixtures::cylinders();
    let pose = |d: Trs| Pose::articulated(&model.skeleton, &[(ELBOW, d)]);
    let rotation = compare_backends(&model, &pose(rot([0.0, 1.0, 1.0], 0.7)), Backend::Dq, Backend::Cga, Exec::Parallel).unwrap();
    assert!(rotation.linf <= 0.02 && rotation.linf > 1e-4, "{rotation:?}");
    let translation = compare_backends(
        &model,
        &pose(Trs::from_translation(Vector3::new(13.0, 0.0, 0.0))),
        Backend::Dq,
        Backend::Cga,
        Exec::Parallel,
    )
    .unwrap();
    assert!(translation.linf <= 0.02, "{translation:?}");
    let dilation = compare_backends(&model, &pose(Trs::from_scale(1.5)), Backend::Lbs, Backend::Cga, Exec::Parallel).unwrap();
    assert!(dilation.linf <= 1e-4, "{dilation:?}");
}

#[test]
fn sequential_and_parallel_are_bit_identical() {
    let model = fixtures::arm();
    let pose = Pose::articulated(&model.skeleton, &[(ELBOW, rot([0.3, 1.0, 0.2], 1.1)), (WRIST, Trs::from_scale(0.8))]);
    for backend in Backend::ALL {
        let a = skin(&model, &pose, backend, Exec::Sequential).unwrap();
        let b = skin(&model, &pose, backend, Exec::Parallel).unwrap();
        assert_eq!(a.positions, b.positions, "{backend:?}");
    }
}

#[test]
fn clip_sampling_hits_keys_and_clamps() {
    let mut model = fixtures::cylinders();
    let bind = model.skeleton.bone(ELBOW).unwrap().bind;
    let k0 = bind;
    let k1 = bind.compose(&rot([0.0, 0.0, 1.0], 1.0));
    generate_keyframe(&mut model, "c", ELBOW, k0, 0.0).unwrap();
    generate_keyframe(&mut model, "c", ELBOW, k1, 2.0).unwrap();
    let clip = model.clips["c"].clone();
    assert_eq!(global_pose_at(&model, &clip, 2.0).globals[ELBOW as usize], k1);
    assert_eq!(global_pose_at(&model, &clip, 5.0), Pose { time: 5.0, ..global_pose_at(&model, &clip, 2.0) });
    assert_eq!(global_pose_at(&model, &clip, -1.0), Pose { time: -1.0, ..global_pose_at(&model, &clip, 0.0) });
    let mid = global_pose_at(&model, &clip, 1.0).globals[ELBOW as usize];
    let expected = rot([0.0, 0.0, 1.0], 0.5).rotation;
    assert!((mid.rotation.normalize().coords - expected.coords).norm() <= 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cga_matches_lbs_for_random_poses(
        axis in prop::array::uniform3(-1.0..1.0f64),
        angle in -3.0..3.0f64,
        t in prop::array::uniform3(-5.0..5.0f64),
        s in 0.5..2.0f64,
        wrist_angle in -2.0..2.0f64,
    ) {
        prop_assume!(Vector3::from(axis).norm() > 1e-2);
        let model = fixtures::cylinders();
        let pose = Pose::articulated(
            &model.skeleton,
            &[
                (ELBOW, Trs::new(Vector3::from(t), rot(axis, angle).rotation, s)),
                (WRIST, rot([0.0, 1.0, 0.0], wrist_angle)),
            ],
        );
        let r = compare_backends(&model, &pose, Backend::Lbs, Backend::Cga, Exec::Sequential).unwrap();
        prop_assert!(r.linf <= 1e-10);
    }

    #[test]
    fn dq_preserves_rigidity_of_single_bone_regions(angle in -3.0..3.0f64) {
        let model = fixtures::cylinders();
        let pose = Pose::articulated(&model.skeleton, &[(ELBOW, rot([0.0, 1.0, 1.0], angle))]);
        let a = skin(&model, &pose, Backend::Dq, Exec::Sequential).unwrap();
        let c = skin(&model, &pose, Backend::Cga, Exec::Sequential).unwrap();
        for (m, inf) in model.binding.influences.iter().enumerate() {
            if inf.len() == 1 {
                prop_assert!((a.positions[m] - c.positions[m]).norm() <= 1e-9);
            }
        }
    }
}
