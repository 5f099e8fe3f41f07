use cgarig::anim::{skin, Backend, Pose};
use cgarig::exec::Exec;
use cgarig::rig::fixtures::{self, ELBOW, WRIST};
use cgarig::rig::{Mesh, RiggedModel, Trs};
use cgarig::tear::{open_tear, scalpel_hit, scripts, tear, Accel, ScalpelState, TearOptions};
use nalgebra::Vector3;
use proptest::prelude::*;

fn radial(time: f64, x: f64, phi: f64, reach: f64) -> ScalpelState {
    let d = Vector3::new(0.0, phi.cos(), phi.sin());
    let c = Vector3::new(x, 0.0, 0.0);
    ScalpelState { time, tip: c + d, tail: c + d * reach }
}

fn torn_poses(model: &RiggedModel) -> Vec<Pose> {
    let y = Vector3::y();
    vec![
        Pose::articulated(&model.skeleton, &[(ELBOW, Trs::from_axis_angle(y, -1.0)), (WRIST, Trs::from_axis_angle(y, 1.0))]),
        Pose::articulated(&model.skeleton, &[(ELBOW, Trs::from_scale(1.5))]),
        Pose::articulated(&model.skeleton, &[(ELBOW, Trs::from_translation(Vector3::new(18.0, 0.0, 0.0)))]),
    ]
}

#[test]
fn bundled_scripts_reproduce_intersection_counts() {
    for (model, states, expected) in [
        (fixtures::cylinders(), scripts::cylinders(), 17),
        (fixtures::arm(), scripts::arm(), 34),
    ] {
        let torn = tear(&model, &states, TearOptions::default()).unwrap();
        assert_eq!(torn.intersection_points(), expected);
        assert_eq!(torn.duplicates.len(), expected);
        assert_eq!(open_tear(&torn, 0.0).unwrap(), torn.model);
        torn.model.validate().unwrap();
        let opened = open_tear(&torn, 0.01 * model.mesh.bbox_diagonal()).unwrap();
        for inf in &opened.binding.influences {
            assert!(inf.len() <= 4 && (inf.sum() - 1.0).abs() <= 1e-9);
        }
        for pose in torn_poses(&opened) {
            for backend in Backend::ALL {
                let frame = skin(&opened, &pose, backend, Exec::Parallel).unwrap();
                assert!(frame.positions.iter().all(|p| p.iter().all(|c| c.is_finite())));
            }
        }
    }
}

#[test]
fn accelerated_tear_is_identical() {
    let model = fixtures::arm();
    let linear = tear(&model, &scripts::arm(), TearOptions { accel: Accel::Linear, exec: Exec::Sequential }).unwrap();
    let bvh = tear(&model, &scripts::arm(), TearOptions { accel: Accel::Bvh, exec: Exec::Parallel }).unwrap();
    assert_eq!(linear.model, bvh.model);
    assert_eq!(linear.duplicates, bvh.duplicates);
}

#[test]
fn cap_hit_matches_closed_form_barycentrics() {
    let model = fixtures::cylinders();
    let target = Vector3::new(0.0, 0.7, -0.4);
    let s = ScalpelState {
        time: 0.0,
        tip: target + Vector3::x(),
        tail: target - Vector3::x(),
    };
    let hit = scalpel_hit(&model.mesh, &s, Accel::Bvh, Exec::Sequential).unwrap();
    assert!((hit.point - target).norm() <= 1e-12);
    let [a, b, c] = model.mesh.triangle(hit.face);
    let cross2 = |u: Vector3<f64>, v: Vector3<f64>| u.y * v.z - u.z * v.y;
    let area = cross2(b - a, c - a);
    let p = cross2(b - target, c - target) / area;
    let q = cross2(c - target, a - target) / area;
    let r = cross2(a - target, b - target) / area;
    assert!((hit.bary.p - p).abs() <= 1e-12);
    assert!((hit.bary.q - q).abs() <= 1e-12);
    assert!((hit.bary.r - r).abs() <= 1e-12);
}

fn mirror_model(model: &RiggedModel) -> RiggedModel {
    let vertices = model.mesh.vertices.iter().map(|v| Vector3::new(v.x, v.y, -v.z)).collect();
    let faces = model.mesh.faces.iter().map(|f| [f[0], f[2], f[1]]).collect();
    model.with_mesh(Mesh::new(vertices, faces), model.binding.clone())
}

fn mirror_state(s: &ScalpelState) -> ScalpelState {
    let m = |v: Vector3<f64>| Vector3::new(v.x, v.y, -v.z);
    ScalpelState { time: s.time, tip: m(s.tip), tail: m(s.tail) }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_step_invariants(x in 25.2..27.8f64, a in 0.05..1.5f64, span in 0.4..2.5f64) {
        let model = fixtures::cylinders();
        let states = [radial(0.0, x, a, 4.0), radial(1.0, x, a + span, 4.0)];
        let torn = tear(&model, &states, TearOptions::default());
        prop_assume!(torn.is_ok());
        let torn = torn.unwrap();
        let k = torn.intersection_points();
        prop_assert_eq!(torn.duplicates.len(), k);
        let before = model.mesh.edge_faces().boundary_edge_count();
        let after = torn.model.mesh.edge_faces().boundary_edge_count();
        prop_assert_eq!(after - before, if k == 0 { 0 } else { 2 * (k + 1) });
        prop_assert!((torn.model.mesh.area() - model.mesh.area()).abs() <= 1e-9 * model.mesh.area());
        prop_assert_eq!(torn.model.mesh.face_components().1, model.mesh.face_components().1);
        torn.model.validate().unwrap();
    }

    #[test]
    fn mirrored_scalpel_tears_the_mirrored_path(x in 25.2..27.8f64, a in 0.05..1.5f64, span in 0.4..2.5f64) {
        let model = fixtures::cylinders();
        let states = [radial(0.0, x, a, 4.0), radial(1.0, x, a + span, 4.0)];
        let torn = tear(&model, &states, TearOptions::default());
        prop_assume!(torn.is_ok());
        let torn = torn.unwrap();
        let mirrored: Vec<_> = states.iter().map(mirror_state).collect();
        let other = tear(&mirror_model(&model), &mirrored, TearOptions::default()).unwrap();
        prop_assert_eq!(torn.intersection_points(), other.intersection_points());
        prop_assert_eq!(torn.model.mesh.vertex_count(), other.model.mesh.vertex_count());
        for v in &torn.model.mesh.vertices {
            let image = Vector3::new(v.x, v.y, -v.z);
            let nearest = other
                .model
                .mesh
                .vertices
                .iter()
                .map(|w| (w - image).norm())
                .fold(f64::INFINITY, f64::min);
            prop_assert!(nearest <= 1e-9);
        }
    }
}
