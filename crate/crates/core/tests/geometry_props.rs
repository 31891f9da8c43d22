mod common;

use common::*;
use handover_core::geometry::{
    matching_transform, transform_pose, HandFrame, RigidTransform, RotationMatrix, UnitQuaternion, Vec3,
};
use nalgebra::{Matrix3, Vector4};
use proptest::prelude::*;

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn matching_carries_imagined_onto_real(seed in any::<u64>()) {
        let mut r = rng(seed);
        let imagined = random_frame(&mut r);
        let real = random_frame(&mut r);
        let h = matching_transform(&imagined, &real);
        // compare against the frames' axes written out independently
        let img_axes = oracle_frame_axes(&imagined.direction(), &imagined.normal());
        let real_axes = oracle_frame_axes(&real.direction(), &real.normal());
        let moved_c = h.apply_point(&imagined.centre());
        prop_assert!((moved_c - real.centre()).norm() <= 1e-9);
        let moved_axes = h.rotation.matrix() * img_axes;
        prop_assert!(moved_axes.column(0).dot(&real_axes.column(0)) >= 1.0 - 1e-9);
        let cos_n = moved_axes.column(2).dot(&real_axes.column(2)).clamp(-1.0, 1.0);
        prop_assert!(cos_n.acos() <= 1e-6);
    }

    #[test]
    fn transform_pose_agrees_with_homogeneous_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p0 = random_vec(&mut r, 1.0);
        let q0 = random_quaternion(&mut r);
        let h = random_transform(&mut r, 1.0);
        let (p, q) = transform_pose(&p0, &q0, &h);
        let expected_r = h.rotation.matrix() * oracle_quat_matrix(&q0);
        prop_assert!((oracle_quat_matrix(&q) - expected_r).norm() <= 1e-9);
        let hp = homogeneous(h.rotation.matrix(), &h.translation) * Vector4::new(p0.x, p0.y, p0.z, 1.0);
        prop_assert!((p - hp.xyz()).norm() <= 1e-9);
        prop_assert!((q.norm() - 1.0).abs() <= 1e-12);
        prop_assert!(q.w >= 0.0);
    }

    #[test]
    fn quaternion_conversion_matches_nalgebra(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rot = random_rotation(&mut r);
        let q = rot.to_quaternion();
        prop_assert!((oracle_quat_matrix(&q) - rot.matrix()).norm() <= 1e-12);
        prop_assert!((q.to_rotation().matrix() - rot.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn rot6d_round_trip(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rot = random_rotation(&mut r);
        let back = RotationMatrix::from_rot6d(&rot.to_rot6d()).unwrap();
        prop_assert!((back.matrix() - rot.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn rot6d_always_yields_a_rotation(a in prop::array::uniform6(-10.0f64..10.0)) {
        // skip near-degenerate inputs, which are rejected by design
        let c0 = Vec3::new(a[0], a[1], a[2]);
        let c1 = Vec3::new(a[3], a[4], a[5]);
        prop_assume!(c0.norm() > 1e-3 && c0.cross(&c1).norm() > 1e-3 * c0.norm() * c1.norm().max(1e-3));
        let m = RotationMatrix::from_rot6d(&a).unwrap();
        let m = m.matrix();
        prop_assert!((m.transpose() * m - Matrix3::identity()).norm() <= 1e-12);
        prop_assert!((m.determinant() - 1.0).abs() <= 1e-12);
        // first column is the normalized first input column
        prop_assert!((m.column(0) - c0 / c0.norm()).norm() <= 1e-12);
    }

    #[test]
    fn composition_matches_matrix_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_transform(&mut r, 2.0);
        let b = random_transform(&mut r, 2.0);
        let ab = a.compose(&b).to_homogeneous();
        let oracle = homogeneous(a.rotation.matrix(), &a.translation) * homogeneous(b.rotation.matrix(), &b.translation);
        prop_assert!((ab - oracle).norm() <= 1e-12);
        let id = a.compose(&a.inverse()).to_homogeneous();
        prop_assert!((id - nalgebra::Matrix4::identity()).norm() <= 1e-12);
        // quaternion product follows rotation product
        let qa = a.quaternion().mul(&b.quaternion());
        prop_assert!((oracle_quat_matrix(&qa) - a.rotation.matrix() * b.rotation.matrix()).norm() <= 1e-12);
    }

    #[test]
    fn frames_ignore_input_scale(seed in any::<u64>(), s in 1e-3f64..1e3, t in 1e-3f64..1e3) {
        let mut r = rng(seed);
        let f = random_frame(&mut r);
        let g = HandFrame::build(f.centre(), f.direction().into_inner() * s, f.normal().into_inner() * t).unwrap();
        prop_assert!((g.rotation().matrix() - f.rotation().matrix()).norm() <= 1e-12);
    }

    #[test]
    fn matching_commutes_with_a_common_motion(seed in any::<u64>()) {
        // moving both frames by G conjugates H: H' = G·H·G⁻¹
        let mut r = rng(seed);
        let a = random_frame(&mut r);
        let b = random_frame(&mut r);
        let g = random_transform(&mut r, 1.0);
        let h = matching_transform(&a, &b);
        let h2 = matching_transform(&a.transformed(&g), &b.transformed(&g));
        let expected = g.compose(&h).compose(&g.inverse());
        prop_assert!((h2.to_homogeneous() - expected.to_homogeneous()).norm() <= 1e-9);
    }
}

#[test]
fn quaternion_sign_is_canonical() {
    let q = UnitQuaternion::new(-0.5, 0.5, 0.5, 0.5).unwrap();
    assert!(q.w >= 0.0);
    assert_eq!(q.to_rotation().to_quaternion(), q);
}

#[test]
fn reflection_is_not_a_rotation() {
    let m = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
    assert!(RotationMatrix::try_from_matrix(m).is_err());
    let bad = [16.0f64, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    assert!(RigidTransform::from_row_major(&bad).is_err());
}
