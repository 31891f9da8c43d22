//! Articulated hand model driven by linear blend skinning.
//!
//! Keypoint layout (21 joints): 0 wrist; 1–4 thumb (4 = tip); 5–8 index;
//! 9–12 middle (12 = tip); 13–16 ring; 17–20 pinky. The first joint of each
//! finger plus the next two are articulated; fingertips ride on the last
//! articulated joint of their chain. That gives 16 skinning joints.

mod file;
mod synthetic;

pub use file::{load_hand_model, save_hand_model, HAND_MODEL_SCHEMA};
pub use synthetic::{synthetic_hand_model, synthetic_rest_keypoints};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{normalize, GeometryError, HandFrame, RigidTransform, RotationMatrix, UnitVec3, Vec3};

pub const NUM_VERTICES: usize = 778;
pub const NUM_KEYPOINTS: usize = 21;
pub const NUM_SKIN_JOINTS: usize = 16;
pub const NUM_SHAPE: usize = 10;

pub const WRIST: usize = 0;
pub const THUMB_BASE: usize = 1;
pub const INDEX_BASE: usize = 5;
pub const MIDDLE_TIP: usize = 12;
pub const PINKY_BASE: usize = 17;

/// Keypoint index of each skinning joint, root first.
pub const SKIN_JOINT_KEYPOINTS: [usize; NUM_SKIN_JOINTS] =
    [0, 1, 2, 3, 5, 6, 7, 9, 10, 11, 13, 14, 15, 17, 18, 19];

/// Kinematic parents of the skinning joints.
pub const SKIN_JOINT_PARENTS: [i32; NUM_SKIN_JOINTS] = [-1, 0, 1, 2, 0, 4, 5, 0, 7, 8, 0, 10, 11, 0, 13, 14];

/// Fingertip keypoints and the skinning joint that carries each.
pub const FINGERTIPS: [(usize, usize); 5] = [(4, 3), (8, 6), (12, 9), (16, 12), (20, 15)];

const MIN_DIRECTION: f64 = 1e-6;
const MIN_TRIPLE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HandModelError {
    #[error("pose block {joint} is not a valid 6D rotation: {source}")]
    InvalidPoseBlock {
        joint: usize,
        #[source]
        source: GeometryError,
    },
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error("degenerate hand direction: wrist and middle fingertip are {0:e} m apart")]
    DegenerateDirection(f64),
    #[error("degenerate palm normal: wrist, index base and pinky base are collinear")]
    DegenerateNormal,
    #[error("ambiguous handedness: triple product {0:e} m^3")]
    AmbiguousHandedness(f64),
    #[error("empty point set")]
    EmptyPointSet,
    #[error("invalid hand model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Left,
    Right,
}

impl Handedness {
    pub fn as_str(&self) -> &'static str {
        match self {
            Handedness::Left => "left",
            Handedness::Right => "right",
        }
    }

    pub fn other(&self) -> Handedness {
        match self {
            Handedness::Left => Handedness::Right,
            Handedness::Right => Handedness::Left,
        }
    }
}

impl fmt::Display for Handedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Handedness {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "left" => Ok(Handedness::Left),
            "right" => Ok(Handedness::Right),
            other => Err(format!("unknown handedness '{other}'")),
        }
    }
}

/// Generic skinning rig: rest vertices, per-vertex joint weights and a
/// kinematic tree whose parents precede their children.
#[derive(Debug, Clone, PartialEq)]
pub struct SkinningRig {
    pub rest_vertices: Vec<Vec3>,
    /// `weights[v][k]`, rows sum to one.
    pub weights: Vec<Vec<f64>>,
    pub rest_joints: Vec<Vec3>,
    /// `None` for the root.
    pub parents: Vec<Option<usize>>,
}

impl SkinningRig {
    pub fn validate(&self) -> Result<(), HandModelError> {
        let k = self.rest_joints.len();
        if k == 0 || self.parents.len() != k {
            return Err(HandModelError::ModelMismatch(format!(
                "{} joints but {} parents",
                k,
                self.parents.len()
            )));
        }
        if self.weights.len() != self.rest_vertices.len() {
            return Err(HandModelError::ModelMismatch(format!(
                "{} vertices but {} weight rows",
                self.rest_vertices.len(),
                self.weights.len()
            )));
        }
        validate_tree(&self.parents)?;
        validate_weights(&self.weights, k)
    }

    /// Per-joint world transforms for the given local rotations. The root
    /// rotates about its own rest position.
    pub fn joint_transforms(&self, local: &[RotationMatrix]) -> Vec<RigidTransform> {
        let mut world: Vec<RigidTransform> = Vec::with_capacity(local.len());
        for (k, rot) in local.iter().enumerate() {
            let g = match self.parents[k] {
                None => RigidTransform::new(*rot, self.rest_joints[k]),
                Some(p) => {
                    world[p].compose(&RigidTransform::new(*rot, self.rest_joints[k] - self.rest_joints[p]))
                }
            };
            world.push(g);
        }
        world
    }

    /// Rest-relative skinning transforms `G_k · T(−j_k)`.
    pub fn skinning_transforms(&self, local: &[RotationMatrix]) -> Vec<RigidTransform> {
        self.joint_transforms(local)
            .iter()
            .zip(&self.rest_joints)
            .map(|(g, j)| g.compose(&RigidTransform::from_translation(-j)))
            .collect()
    }

    /// Blends the skinning transforms per vertex and adds the global translation.
    pub fn skin(
        &self,
        local: &[RotationMatrix],
        translation: &Vec3,
    ) -> Result<(Vec<Vec3>, Vec<RigidTransform>), HandModelError> {
        if local.len() != self.rest_joints.len() {
            return Err(HandModelError::ModelMismatch(format!(
                "{} rotations for {} joints",
                local.len(),
                self.rest_joints.len()
            )));
        }
        let a = self.skinning_transforms(local);
        let vertices = self
            .rest_vertices
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| {
                let mut out = Vec3::zeros();
                for (k, &wk) in w.iter().enumerate() {
                    if wk != 0.0 {
                        out += a[k].apply_point(v) * wk;
                    }
                }
                out + translation
            })
            .collect();
        Ok((vertices, a))
    }
}

fn validate_tree(parents: &[Option<usize>]) -> Result<(), HandModelError> {
    if parents.first() != Some(&None) {
        return Err(HandModelError::InvalidModel("joint 0 must be the root".into()));
    }
    for (k, p) in parents.iter().enumerate().skip(1) {
        match p {
            Some(p) if *p < k => {}
            _ => {
                return Err(HandModelError::InvalidModel(format!(
                    "joint {k} must have a parent listed before it"
                )))
            }
        }
    }
    Ok(())
}

fn validate_weights(weights: &[Vec<f64>], k: usize) -> Result<(), HandModelError> {
    for (v, row) in weights.iter().enumerate() {
        if row.len() != k {
            return Err(HandModelError::ModelMismatch(format!(
                "weight row {v} has {} entries, expected {k}",
                row.len()
            )));
        }
        if row.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(HandModelError::InvalidModel(format!("negative weight in row {v}")));
        }
        let sum: f64 = row.iter().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(HandModelError::InvalidModel(format!("weight row {v} sums to {sum}")));
        }
    }
    Ok(())
}

/// Parameters of the parametric hand.
#[derive(Debug, Clone, PartialEq)]
pub struct HandModel {
    pub handedness: Handedness,
    pub template: Vec<Vec3>,
    /// `V × 16` skinning weights.
    pub weights: Vec<Vec<f64>>,
    /// `21 × V` joint regressor.
    pub regressor: Vec<Vec<f64>>,
    /// `shape_dirs[v][i]` is the displacement of vertex `v` per unit of `β_i`.
    pub shape_dirs: Option<Vec<[Vec3; NUM_SHAPE]>>,
    pub parents: [i32; NUM_SKIN_JOINTS],
    /// Triangle indices, used only for export.
    pub faces: Vec<[u32; 3]>,
}

impl HandModel {
    pub fn validate(&self) -> Result<(), HandModelError> {
        if self.template.len() != NUM_VERTICES {
            return Err(HandModelError::ModelMismatch(format!(
                "template has {} vertices, expected {NUM_VERTICES}",
                self.template.len()
            )));
        }
        if self.weights.len() != NUM_VERTICES {
            return Err(HandModelError::ModelMismatch("weight row count".into()));
        }
        if self.regressor.len() != NUM_KEYPOINTS || self.regressor.iter().any(|r| r.len() != NUM_VERTICES) {
            return Err(HandModelError::ModelMismatch("regressor must be 21 x 778".into()));
        }
        if let Some(dirs) = &self.shape_dirs {
            if dirs.len() != NUM_VERTICES {
                return Err(HandModelError::ModelMismatch("shape dirs row count".into()));
            }
        }
        if self.faces.iter().flatten().any(|&i| i as usize >= NUM_VERTICES) {
            return Err(HandModelError::InvalidModel("face index out of range".into()));
        }
        validate_tree(&self.parent_indices())?;
        validate_weights(&self.weights, NUM_SKIN_JOINTS)
    }

    pub fn parent_indices(&self) -> Vec<Option<usize>> {
        self.parents.iter().map(|&p| if p < 0 { None } else { Some(p as usize) }).collect()
    }

    pub fn shaped_template(&self, shape: &[f64; NUM_SHAPE]) -> Vec<Vec3> {
        match &self.shape_dirs {
            Some(dirs) if shape.iter().any(|b| *b != 0.0) => self
                .template
                .iter()
                .zip(dirs)
                .map(|(v, d)| {
                    let mut out = *v;
                    for (b, dir) in shape.iter().zip(d) {
                        out += dir * *b;
                    }
                    out
                })
                .collect(),
            _ => self.template.clone(),
        }
    }

    pub fn regress_keypoints(&self, vertices: &[Vec3]) -> Vec<Vec3> {
        self.regressor
            .iter()
            .map(|row| {
                row.iter()
                    .zip(vertices)
                    .filter(|(w, _)| **w != 0.0)
                    .fold(Vec3::zeros(), |acc, (w, v)| acc + v * *w)
            })
            .collect()
    }

    pub fn rig(&self, shape: &[f64; NUM_SHAPE]) -> (SkinningRig, Vec<Vec3>) {
        let rest_vertices = self.shaped_template(shape);
        let keypoints = self.regress_keypoints(&rest_vertices);
        let rig = SkinningRig {
            rest_joints: SKIN_JOINT_KEYPOINTS.iter().map(|&i| keypoints[i]).collect(),
            rest_vertices,
            weights: self.weights.clone(),
            parents: self.parent_indices(),
        };
        (rig, keypoints)
    }

    /// Reflects the model through the xz-plane, producing the opposite hand.
    pub fn mirrored(&self) -> HandModel {
        let flip = |v: &Vec3| Vec3::new(v.x, -v.y, v.z);
        HandModel {
            handedness: self.handedness.other(),
            template: self.template.iter().map(flip).collect(),
            weights: self.weights.clone(),
            regressor: self.regressor.clone(),
            shape_dirs: self
                .shape_dirs
                .as_ref()
                .map(|dirs| dirs.iter().map(|d| d.map(|v| flip(&v))).collect()),
            parents: self.parents,
            faces: self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect(),
        }
    }
}

/// Translation, per-joint 6D rotations (root first) and shape of one hand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandPose {
    pub translation: [f64; 3],
    pub pose: Vec<[f64; 6]>,
    #[serde(default)]
    pub shape: [f64; NUM_SHAPE],
    pub handedness: Handedness,
}

pub const IDENTITY_6D: [f64; 6] = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0];

impl HandPose {
    pub fn identity(handedness: Handedness) -> Self {
        Self {
            translation: [0.0; 3],
            pose: vec![IDENTITY_6D; NUM_SKIN_JOINTS],
            shape: [0.0; NUM_SHAPE],
            handedness,
        }
    }

    pub fn with_root(mut self, root: &RotationMatrix, translation: Vec3) -> Self {
        self.pose[0] = root.to_rot6d();
        self.translation = translation.into();
        self
    }

    pub fn local_rotations(&self) -> Result<Vec<RotationMatrix>, HandModelError> {
        if self.pose.len() != NUM_SKIN_JOINTS {
            return Err(HandModelError::ModelMismatch(format!(
                "pose has {} blocks, expected {NUM_SKIN_JOINTS}",
                self.pose.len()
            )));
        }
        self.pose
            .iter()
            .enumerate()
            .map(|(joint, block)| {
                RotationMatrix::from_rot6d(block)
                    .map_err(|source| HandModelError::InvalidPoseBlock { joint, source })
            })
            .collect()
    }
}

/// Output of the skinning pass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosedHand {
    pub handedness: Handedness,
    #[serde(with = "crate::serde_util::vec3_list")]
    pub vertices: Vec<Vec3>,
    #[serde(with = "crate::serde_util::vec3_list")]
    pub joints: Vec<Vec3>,
}

impl PosedHand {
    pub fn transformed(&self, h: &RigidTransform) -> PosedHand {
        PosedHand {
            handedness: self.handedness,
            vertices: self.vertices.iter().map(|v| h.apply_point(v)).collect(),
            joints: self.joints.iter().map(|v| h.apply_point(v)).collect(),
        }
    }
}

/// Skins `model` with `pose`. Joints and vertices come back in world space.
pub fn lbs_forward(model: &HandModel, pose: &HandPose) -> Result<PosedHand, HandModelError> {
    if model.handedness != pose.handedness {
        return Err(HandModelError::ModelMismatch(format!(
            "{} pose on a {} model",
            pose.handedness, model.handedness
        )));
    }
    if model.template.len() != model.weights.len() {
        return Err(HandModelError::ModelMismatch("weights do not match template".into()));
    }
    let local = pose.local_rotations()?;
    let (rig, rest_keypoints) = model.rig(&pose.shape);
    let t = Vec3::from(pose.translation);
    let (vertices, skin) = rig.skin(&local, &t)?;

    let mut joints = vec![Vec3::zeros(); NUM_KEYPOINTS];
    for (k, &kp) in SKIN_JOINT_KEYPOINTS.iter().enumerate() {
        joints[kp] = skin[k].apply_point(&rest_keypoints[kp]) + t;
    }
    for &(tip, carrier) in &FINGERTIPS {
        joints[tip] = skin[carrier].apply_point(&rest_keypoints[tip]) + t;
    }
    Ok(PosedHand { handedness: model.handedness, vertices, joints })
}

fn keypoint(joints: &[Vec3], i: usize) -> Result<Vec3, HandModelError> {
    joints.get(i).copied().ok_or_else(|| {
        HandModelError::ModelMismatch(format!("{} keypoints, expected {NUM_KEYPOINTS}", joints.len()))
    })
}

/// Unit vector from the wrist to the middle fingertip.
pub fn hand_direction(joints: &[Vec3]) -> Result<UnitVec3, HandModelError> {
    let d = keypoint(joints, MIDDLE_TIP)? - keypoint(joints, WRIST)?;
    let n = d.norm();
    if n < MIN_DIRECTION {
        return Err(HandModelError::DegenerateDirection(n));
    }
    Ok(normalize(&d)?)
}

/// Outward palm normal. The raw cross product `(index − wrist) × (pinky − wrist)`
/// exits the palm side of a right hand; it is negated for a left hand.
pub fn palm_normal(joints: &[Vec3], handedness: Handedness) -> Result<UnitVec3, HandModelError> {
    let w = keypoint(joints, WRIST)?;
    let a = keypoint(joints, INDEX_BASE)? - w;
    let b = keypoint(joints, PINKY_BASE)? - w;
    let n = a.cross(&b);
    let scale = a.norm() * b.norm();
    if scale == 0.0 || n.norm() <= 1e-9 * scale {
        return Err(HandModelError::DegenerateNormal);
    }
    let n = match handedness {
        Handedness::Right => n,
        Handedness::Left => -n,
    };
    normalize(&n).map_err(|_| HandModelError::DegenerateNormal)
}

/// Arithmetic mean of the points.
pub fn geometric_center(points: &[Vec3]) -> Result<Vec3, HandModelError> {
    if points.is_empty() {
        return Err(HandModelError::EmptyPointSet);
    }
    let sum = points.iter().fold(Vec3::zeros(), |acc, p| acc + p);
    Ok(sum / points.len() as f64)
}

/// Handedness from the sign of `((index − wrist) × (pinky − wrist)) · (thumb − wrist)`.
/// Positive is a right hand.
pub fn classify_handedness(joints: &[Vec3]) -> Result<Handedness, HandModelError> {
    let w = keypoint(joints, WRIST)?;
    let a = keypoint(joints, INDEX_BASE)? - w;
    let b = keypoint(joints, PINKY_BASE)? - w;
    let c = keypoint(joints, THUMB_BASE)? - w;
    let triple = a.cross(&b).dot(&c);
    if !triple.is_finite() || triple.abs() < MIN_TRIPLE {
        return Err(HandModelError::AmbiguousHandedness(triple));
    }
    Ok(if triple > 0.0 { Handedness::Right } else { Handedness::Left })
}

/// Frame of a posed hand, centred on the mesh vertex centroid.
pub fn hand_frame_of(hand: &PosedHand) -> Result<HandFrame, HandModelError> {
    frame_from_points(&hand.vertices, &hand.joints, hand.handedness)
}

/// Frame of a posed hand, centred on the keypoint centroid.
pub fn keypoint_frame_of(hand: &PosedHand) -> Result<HandFrame, HandModelError> {
    frame_from_points(&hand.joints, &hand.joints, hand.handedness)
}

pub fn frame_from_points(
    centre_points: &[Vec3],
    joints: &[Vec3],
    handedness: Handedness,
) -> Result<HandFrame, HandModelError> {
    let c = geometric_center(centre_points)?;
    let d = hand_direction(joints)?;
    let p = palm_normal(joints, handedness)?;
    Ok(HandFrame::build(c, d.into_inner(), p.into_inner())?)
}
