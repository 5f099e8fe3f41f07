use cgarig::reskin::{blend, weight_by_barycentric, weight_by_edge, BaryCoord};
use cgarig::rig::fixtures;
use cgarig::rig::{load_rig, to_json, Influences};
use proptest::prelude::*;

fn influences() -> impl Strategy<Value = Influences> {
    prop::collection::btree_map(0u32..12, 0.05..1.0f64, 1..=4).prop_map(|m| {
        let sum: f64 = m.values().sum();
        let pairs: Vec<(u32, f64)> = m.into_iter().map(|(b, w)| (b, w / sum)).collect();
        Influences::from_pairs(&pairs).unwrap()
    })
}

fn bary() -> impl Strategy<Value = BaryCoord> {
    (0.0..1.0f64, 0.0..1.0f64).prop_map(|(u, v)| {
        let (u, v) = if u + v > 1.0 { (1.0 - u, 1.0 - v) } else { (u, v) };
        BaryCoord::new(0, 1.0 - u - v, u, v).unwrap()
    })
}

proptest! {
    #[test]
    fn barycentric_weights_are_valid(a in influences(), b in influences(), c in influences(), w in bary()) {
        let out = weight_by_barycentric([&a, &b, &c], &w).unwrap();
        prop_assert!(out.len() <= 4);
        prop_assert!((out.sum() - 1.0).abs() <= 1e-9);
        let blended = blend([&a, &b, &c], w.weights());
        if blended.values().filter(|&&x| x > 0.0).count() <= 4 {
            for i in out.iter() {
                prop_assert!((i.weight - blended[&i.bone]).abs() <= 1e-12);
            }
        } else {
            let mut ranked: Vec<f64> = blended.values().copied().collect();
            ranked.sort_by(|x, y| y.total_cmp(x));
            let kept: f64 = out.iter().map(|i| blended[&i.bone]).sum();
            prop_assert!((kept - ranked[..4].iter().sum::<f64>()).abs() <= 1e-12);
        }
    }

    #[test]
    fn corner_coordinates_reproduce_corner_weights(a in influences(), b in influences(), c in influences()) {
        let out = weight_by_barycentric([&a, &b, &c], &BaryCoord::new(0, 0.0, 1.0, 0.0).unwrap()).unwrap();
        for i in b.iter() {
            prop_assert!((out.weight_of(i.bone) - i.weight).abs() <= 1e-12);
        }
    }

    #[test]
    fn edge_weights_interpolate(a in influences(), b in influences(), lambda in 0.0..1.0f64) {
        let out = weight_by_edge(&a, &b, lambda).unwrap();
        prop_assert!(out.len() <= 4 && (out.sum() - 1.0).abs() <= 1e-9);
        let at_a = weight_by_edge(&a, &b, 0.0).unwrap();
        for i in a.iter() {
            prop_assert!((at_a.weight_of(i.bone) - i.weight).abs() <= 1e-12);
        }
    }
}

#[test]
fn invalid_barycentrics_are_rejected() {
    assert!(BaryCoord::new(0, 0.5, 0.6, 0.0).is_err());
    assert!(BaryCoord::new(0, -0.1, 0.6, 0.5).is_err());
}

#[test]
fn fixtures_roundtrip_through_json() {
    for (_, model) in fixtures::make_test_models() {
        let text = to_json(&model);
        let back = load_rig(&text).unwrap();
        assert_eq!(back, model);
        assert_eq!(to_json(&back), text);
    }
}
