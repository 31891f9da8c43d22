//! Procedural right hand with 778 vertices, used in tests and as the default
//! model when no model file is given.
//!
//! Rest pose: wrist at the origin, fingers along +x, palm facing −z, thumb on
//! the +y side. Each finger is a tube of 16 rings × 8 vertices plus a tip
//! vertex (5 × 129 = 645); the palm is 11 rings × 12 vertices plus a wrist
//! vertex (133).

use std::f64::consts::TAU;

use super::{
    HandModel, Handedness, NUM_KEYPOINTS, NUM_SHAPE, NUM_SKIN_JOINTS, NUM_VERTICES, SKIN_JOINT_KEYPOINTS,
    SKIN_JOINT_PARENTS,
};
use crate::geometry::Vec3;

const FINGER_RING: usize = 8;
const PALM_RING: usize = 12;
const PALM_RINGS: usize = 11;
/// Rings per finger segment; the first ring of each segment sits on its joint.
const SEGMENT_RINGS: [usize; 3] = [6, 5, 5];

const REST: [[f64; 3]; NUM_KEYPOINTS] = [
    [0.000, 0.000, 0.000],
    [0.020, 0.020, -0.010],
    [0.045, 0.040, -0.012],
    [0.070, 0.052, -0.012],
    [0.092, 0.060, -0.010],
    [0.085, 0.025, 0.000],
    [0.125, 0.027, 0.000],
    [0.150, 0.028, 0.000],
    [0.172, 0.029, 0.000],
    [0.090, 0.004, 0.000],
    [0.135, 0.004, 0.000],
    [0.163, 0.004, 0.000],
    [0.188, 0.004, 0.000],
    [0.085, -0.016, 0.000],
    [0.125, -0.017, 0.000],
    [0.152, -0.018, 0.000],
    [0.175, -0.019, 0.000],
    [0.075, -0.034, 0.000],
    [0.105, -0.037, 0.000],
    [0.125, -0.039, 0.000],
    [0.143, -0.040, 0.000],
];

/// Keypoint chains (base, two articulated joints, tip) and tube radii.
const FINGERS: [([usize; 4], f64); 5] = [
    ([1, 2, 3, 4], 0.011),
    ([5, 6, 7, 8], 0.009),
    ([9, 10, 11, 12], 0.0095),
    ([13, 14, 15, 16], 0.009),
    ([17, 18, 19, 20], 0.008),
];

pub fn synthetic_rest_keypoints() -> Vec<Vec3> {
    REST.iter().map(|p| Vec3::from(*p)).collect()
}

fn skin_index(keypoint: usize) -> usize {
    SKIN_JOINT_KEYPOINTS.iter().position(|&k| k == keypoint).expect("articulated keypoint")
}

fn ring_basis(axis: &Vec3) -> (Vec3, Vec3) {
    let axis = axis.normalize();
    let u = axis.cross(&Vec3::z()).normalize();
    let w = axis.cross(&u);
    (u, w)
}

fn one_hot(k: usize) -> Vec<f64> {
    let mut w = vec![0.0; NUM_SKIN_JOINTS];
    w[k] = 1.0;
    w
}

fn blend(a: usize, b: usize, wa: f64) -> Vec<f64> {
    let mut w = vec![0.0; NUM_SKIN_JOINTS];
    w[a] += wa;
    w[b] += 1.0 - wa;
    w
}

pub fn synthetic_hand_model() -> HandModel {
    let rest = synthetic_rest_keypoints();
    let mut template = Vec::with_capacity(NUM_VERTICES);
    let mut weights = Vec::with_capacity(NUM_VERTICES);
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut regressor = vec![vec![0.0; NUM_VERTICES]; NUM_KEYPOINTS];

    // Palm: elliptic rings from the wrist to the knuckles, all on the root.
    let wrist_vertex = template.len();
    template.push(rest[0]);
    weights.push(one_hot(0));
    regressor[0][wrist_vertex] = 1.0;
    let palm_start = template.len();
    for r in 0..PALM_RINGS {
        let f = (r + 1) as f64 / PALM_RINGS as f64;
        let x = 0.08 * f;
        let half_width = 0.030 + 0.015 * f;
        for i in 0..PALM_RING {
            let phi = TAU * i as f64 / PALM_RING as f64;
            template.push(Vec3::new(x, -0.003 + half_width * phi.cos(), 0.012 * phi.sin()));
            weights.push(one_hot(0));
        }
    }
    for i in 0..PALM_RING {
        let a = palm_start + i;
        let b = palm_start + (i + 1) % PALM_RING;
        faces.push([wrist_vertex as u32, b as u32, a as u32]);
    }
    for r in 0..PALM_RINGS - 1 {
        tube_faces(&mut faces, palm_start + r * PALM_RING, PALM_RING);
    }

    for (chain, radius) in FINGERS {
        let joints: Vec<usize> = chain[..3].iter().map(|&k| skin_index(k)).collect();
        let parent_of_base = SKIN_JOINT_PARENTS[joints[0]] as usize;
        let finger_start = template.len();
        for seg in 0..3 {
            let (a, b) = (rest[chain[seg]], rest[chain[seg + 1]]);
            let (u, w) = ring_basis(&(b - a));
            let n = SEGMENT_RINGS[seg];
            for r in 0..n {
                let f = r as f64 / n as f64;
                let centre = a + (b - a) * f;
                let taper = radius * (1.0 - 0.25 * (seg as f64 + f) / 3.0);
                let prev = if seg == 0 { parent_of_base } else { joints[seg - 1] };
                let weight =
                    if f < 0.2 { blend(joints[seg], prev, 0.5 + 2.5 * f) } else { one_hot(joints[seg]) };
                let ring_start = template.len();
                for i in 0..FINGER_RING {
                    let phi = TAU * i as f64 / FINGER_RING as f64;
                    template.push(centre + (u * phi.cos() + w * phi.sin()) * taper);
                    weights.push(weight.clone());
                }
                if r == 0 {
                    let row = &mut regressor[chain[seg]];
                    row[ring_start..ring_start + FINGER_RING].fill(1.0 / FINGER_RING as f64);
                }
            }
        }
        let rings = SEGMENT_RINGS.iter().sum::<usize>();
        for r in 0..rings - 1 {
            tube_faces(&mut faces, finger_start + r * FINGER_RING, FINGER_RING);
        }
        let tip = template.len();
        template.push(rest[chain[3]]);
        weights.push(one_hot(joints[2]));
        regressor[chain[3]][tip] = 1.0;
        let last = finger_start + (rings - 1) * FINGER_RING;
        for i in 0..FINGER_RING {
            let a = last + i;
            let b = last + (i + 1) % FINGER_RING;
            faces.push([a as u32, b as u32, tip as u32]);
        }
    }
    debug_assert_eq!(template.len(), NUM_VERTICES);

    let shape_dirs = template
        .iter()
        .map(|v| {
            let mut d = [Vec3::zeros(); NUM_SHAPE];
            d[0] = v * 0.1;
            d[1] = Vec3::new(v.x * 0.1, 0.0, 0.0);
            d[2] = Vec3::new(0.0, v.y * 0.1, 0.0);
            d[3] = Vec3::new(0.0, 0.0, v.z * 0.1);
            d
        })
        .collect();

    HandModel {
        handedness: Handedness::Right,
        template,
        weights,
        regressor,
        shape_dirs: Some(shape_dirs),
        parents: SKIN_JOINT_PARENTS,
        faces,
    }
}

fn tube_faces(faces: &mut Vec<[u32; 3]>, ring_start: usize, n: usize) {
    for i in 0..n {
        let a = (ring_start + i) as u32;
        let b = (ring_start + (i + 1) % n) as u32;
        let c = a + n as u32;
        let d = b + n as u32;
        faces.push([a, b, d]);
        faces.push([a, d, c]);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand_model::classify_handedness;

    #[test]
    fn synthetic_model_is_valid() {
        let m = synthetic_hand_model();
        m.validate().unwrap();
        assert_eq!(m.template.len(), 778);
    }

    #[test]
    fn regressor_reproduces_rest_keypoints() {
        let m = synthetic_hand_model();
        let kp = m.regress_keypoints(&m.template);
        for (a, b) in kp.iter().zip(synthetic_rest_keypoints()) {
            assert!((a - b).norm() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(classify_handedness(&kp).unwrap(), Handedness::Right);
    }
}
