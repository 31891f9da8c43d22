//! Random generators and independent reference computations shared by the
//! integration tests and the acceptance run.

#![allow(dead_code)]

use std::path::PathBuf;

use handover_core::geometry::{HandFrame, RigidTransform, RotationMatrix, UnitQuaternion, Vec3};
use nalgebra::{Matrix3, Matrix4, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn random_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

/// Uniform direction by rejection from the unit cube.
pub fn random_unit(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = random_vec(rng, 1.0);
        let n = v.norm();
        if (0.1..=1.0).contains(&n) {
            return v / n;
        }
    }
}

/// Uniform rotation from a random unit quaternion, built with nalgebra.
pub fn random_rotation(rng: &mut impl Rng) -> RotationMatrix {
    let q: Vector4<f64> = loop {
        let v = Vector4::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let n = v.norm();
        if (0.1..=1.0).contains(&n) {
            break v / n;
        }
    };
    let uq = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q[0], q[1], q[2], q[3]));
    RotationMatrix::try_from_matrix(*uq.to_rotation_matrix().matrix()).expect("rotation")
}

pub fn random_transform(rng: &mut impl Rng, scale: f64) -> RigidTransform {
    RigidTransform::new(random_rotation(rng), random_vec(rng, scale))
}

/// Random well-conditioned frame: the normal is kept at least ~25° from the
/// direction.
pub fn random_frame(rng: &mut impl Rng) -> HandFrame {
    let c = random_vec(rng, 2.0);
    let d = random_unit(rng);
    let n = loop {
        let n = random_unit(rng);
        if n.dot(&d).abs() < 0.9 {
            break n;
        }
    };
    HandFrame::build(c, d, n).expect("frame")
}

/// Frame axes written out directly: x = d/‖d‖, z = Gram–Schmidt normal, y = z × x.
pub fn oracle_frame_axes(d: &Vec3, n: &Vec3) -> Matrix3<f64> {
    let x = d / d.norm();
    let z = n - x * x.dot(n);
    let z = z / z.norm();
    Matrix3::from_columns(&[x, z.cross(&x), z])
}

/// Hand frame from 21 keypoints without going through the library:
/// centroid, wrist → middle tip, and the (index base, pinky base) cross product.
pub fn oracle_keypoint_frame(j: &[Vec3], right: bool) -> (Vec3, Matrix3<f64>) {
    let c = j.iter().fold(Vec3::zeros(), |a, p| a + p) / j.len() as f64;
    let d = j[12] - j[0];
    let mut n = (j[5] - j[0]).cross(&(j[17] - j[0]));
    if !right {
        n = -n;
    }
    (c, oracle_frame_axes(&d, &n))
}

pub fn homogeneous(r: &Matrix3<f64>, t: &Vec3) -> Matrix4<f64> {
    let mut m = Matrix4::identity();
    for i in 0..3 {
        for k in 0..3 {
            m[(i, k)] = r[(i, k)];
        }
        m[(i, 3)] = t[i];
    }
    m
}

/// Rotation of a Hamilton quaternion through nalgebra.
pub fn oracle_quat_matrix(q: &UnitQuaternion) -> Matrix3<f64> {
    let nq = nalgebra::UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q.w, q.x, q.y, q.z));
    *nq.to_rotation_matrix().matrix()
}

pub fn random_quaternion(rng: &mut impl Rng) -> UnitQuaternion {
    random_rotation(rng).to_quaternion()
}
