//! Synthetic object clouds and reference hand keypoints for demos and tests.

use crate::cloud::ObjectCloud;
use crate::geometry::{RotationMatrix, Vec3};
use crate::hand_model::{lbs_forward, HandModel, HandPose, Handedness};

/// Side surface of a z-aligned cylinder centred on the origin, sampled on a
/// golden-angle spiral, with outward normals.
pub fn cylinder_cloud(radius: f64, height: f64, n: usize) -> ObjectCloud {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let mut points = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    for i in 0..n {
        let z = -height / 2.0 + height * (i as f64 + 0.5) / n as f64;
        let t = golden * i as f64;
        let (s, c) = t.sin_cos();
        points.push(Vec3::new(radius * c, radius * s, z));
        normals.push(Vec3::new(c, s, 0.0));
    }
    ObjectCloud { name: "cylinder".into(), points, normals: Some(normals) }
}

/// Surface of an axis-aligned box centred on the origin: `per_edge²` cell
/// centres on each face, with face normals.
pub fn box_cloud(size: [f64; 3], per_edge: usize) -> ObjectCloud {
    let half = Vec3::from(size) / 2.0;
    let m = per_edge as f64;
    let mut points = Vec::new();
    let mut normals = Vec::new();
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for sign in [-1.0, 1.0] {
            for i in 0..per_edge {
                for j in 0..per_edge {
                    let mut p = Vec3::zeros();
                    p[axis] = sign * half[axis];
                    p[u] = -half[u] + size[u] * (i as f64 + 0.5) / m;
                    p[v] = -half[v] + size[v] * (j as f64 + 0.5) / m;
                    let mut n = Vec3::zeros();
                    n[axis] = sign;
                    points.push(p);
                    normals.push(n);
                }
            }
        }
    }
    ObjectCloud { name: "box".into(), points, normals: Some(normals) }
}

/// Keypoints of `model` in its rest pose, rotated and moved into the world.
pub fn observed_keypoints(model: &HandModel, rotation: &RotationMatrix, translation: Vec3) -> Vec<Vec3> {
    let pose = HandPose::identity(model.handedness).with_root(rotation, translation);
    lbs_forward(model, &pose).expect("identity finger pose is valid").joints
}

/// A right or left hand held out in front of a camera, palm up.
pub fn reference_keypoints(model: &HandModel) -> Vec<Vec3> {
    let r = RotationMatrix::rot_x(std::f64::consts::PI).compose(&RotationMatrix::rot_z(0.4));
    let hand_sign = match model.handedness {
        Handedness::Right => 1.0,
        Handedness::Left => -1.0,
    };
    observed_keypoints(model, &r, Vec3::new(0.45, 0.1 * hand_sign, 0.9))
}
