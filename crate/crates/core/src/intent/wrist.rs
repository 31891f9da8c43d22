//! Receiving-hand poses from wrist angles and grip type.
//!
//! Wrist angles are in degrees relative to the model's rest pose:
//! `pro_sup` positive for pronation, `flex_ext` positive for flexion,
//! `rad_uln` positive for radial deviation. For the right-hand rest pose
//! (fingers +x, palm −z, thumb +y) these are rotations about −x, +y and +z.
//! Left-hand rotations are the mirror images through the xz-plane.

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::geometry::{RotationMatrix, Vec3};
use crate::hand_model::{HandPose, Handedness};

/// Maximal wrist ranges, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WristBounds {
    pub pronation: f64,
    pub supination: f64,
    pub flexion: f64,
    pub extension: f64,
    pub radial: f64,
    pub ulnar: f64,
}

impl Default for WristBounds {
    fn default() -> Self {
        Self { pronation: 76.0, supination: 85.0, flexion: 75.0, extension: 75.0, radial: 20.0, ulnar: 45.0 }
    }
}

impl WristBounds {
    pub fn contains(&self, a: &WristAngles) -> bool {
        (-self.supination..=self.pronation).contains(&a.pro_sup)
            && (-self.extension..=self.flexion).contains(&a.flex_ext)
            && (-self.ulnar..=self.radial).contains(&a.rad_uln)
    }

    pub fn clip(&self, a: &WristAngles) -> (WristAngles, bool) {
        let clipped = WristAngles {
            pro_sup: a.pro_sup.clamp(-self.supination, self.pronation),
            flex_ext: a.flex_ext.clamp(-self.extension, self.flexion),
            rad_uln: a.rad_uln.clamp(-self.ulnar, self.radial),
        };
        let changed = clipped != *a;
        (clipped, changed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WristAngles {
    pub pro_sup: f64,
    pub flex_ext: f64,
    pub rad_uln: f64,
}

impl WristAngles {
    pub fn new(pro_sup: f64, flex_ext: f64, rad_uln: f64) -> Self {
        Self { pro_sup, flex_ext, rad_uln }
    }
}

/// Grip styles, least to most stable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GripType {
    Open,
    PreciseGrip,
    PowerGrip,
}

impl GripType {
    /// Flexion per finger joint in degrees: (thumb, index, other fingers).
    fn curl(&self) -> (f64, f64, f64) {
        match self {
            GripType::Open => (0.0, 0.0, 0.0),
            GripType::PreciseGrip => (25.0, 30.0, 15.0),
            GripType::PowerGrip => (35.0, 60.0, 60.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledWristPose {
    pub angles: WristAngles,
    /// Set when the request was outside the bounds and got clipped.
    pub clipped: bool,
    pub grip: GripType,
    pub pose: HandPose,
}

fn mirror(r: &RotationMatrix, hand: Handedness) -> RotationMatrix {
    match hand {
        Handedness::Right => *r,
        Handedness::Left => {
            let m = Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, 1.0));
            RotationMatrix::from_matrix_unchecked(m * r.matrix() * m)
        }
    }
}

fn wrist_rotation(a: &WristAngles) -> RotationMatrix {
    RotationMatrix::rot_x(-a.pro_sup.to_radians())
        .compose(&RotationMatrix::rot_y(a.flex_ext.to_radians()))
        .compose(&RotationMatrix::rot_z(a.rad_uln.to_radians()))
}

pub fn sample_wrist_pose(
    request: &WristAngles,
    grip: GripType,
    hand: Handedness,
    bounds: &WristBounds,
) -> SampledWristPose {
    let (angles, clipped) = bounds.clip(request);
    let mut pose = HandPose::identity(hand);
    pose.pose[0] = mirror(&wrist_rotation(&angles), hand).to_rot6d();
    let (thumb, index, rest) = grip.curl();
    for (k, block) in pose.pose.iter_mut().enumerate().skip(1) {
        // chains start at skin joints 1, 4, 7, 10, 13 (thumb first)
        let chain = (k - 1) / 3;
        let deg = match chain {
            0 => thumb,
            1 => index,
            _ => rest,
        };
        if deg != 0.0 {
            *block = mirror(&RotationMatrix::rot_y(deg.to_radians()), hand).to_rot6d();
        }
    }
    SampledWristPose { angles, clipped, grip, pose }
}

/// The nine canonical receiving poses: extension limit, neutral and flexion
/// limit, each combined with a neutral forearm, full supination, and
/// full pronation with ulnar deviation.
pub fn canonical_wrist_poses(
    grip: GripType,
    hand: Handedness,
    bounds: &WristBounds,
) -> Vec<SampledWristPose> {
    let combos = [(0.0, 0.0), (-bounds.supination, 0.0), (bounds.pronation, -bounds.ulnar)];
    let flex = [-bounds.extension, 0.0, bounds.flexion];
    combos
        .iter()
        .flat_map(|&(ps, ru)| {
            flex.iter().map(move |&fe| sample_wrist_pose(&WristAngles::new(ps, fe, ru), grip, hand, bounds))
        })
        .collect()
}
