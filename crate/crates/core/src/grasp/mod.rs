//! Gripper candidates, scoring against the receiving hand, and clearance.
//!
//! A candidate's pose maps gripper coordinates into the object frame. In the
//! gripper frame +z is the approach axis (base towards fingers), +x the
//! closing axis, and the origin sits midway between the fingertips.

mod antipodal;

pub use antipodal::{antipodal_candidates, AntipodalParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::CloudError;
use crate::geometry::{RigidTransform, UnitVec3, Vec3};
use crate::hand_model::{geometric_center, hand_direction, HandModelError, PosedHand};

/// Widest opening of the parallel gripper, meters.
pub const MAX_GRIPPER_WIDTH: f64 = 0.074;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraspError {
    #[error("jaw width {0} m outside (0, {MAX_GRIPPER_WIDTH}]")]
    WidthOutOfRange(f64),
    #[error("candidate set is empty")]
    EmptyCandidateSet,
    #[error("no antipodal candidates found")]
    NoCandidatesFound,
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error("invalid gripper geometry: {0}")]
    InvalidGeometry(String),
    #[error(transparent)]
    Hand(#[from] HandModelError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    External,
    AntipodalSampler,
    File,
}

/// Gripper pose in the object frame plus jaw width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraspRecord", into = "GraspRecord")]
pub struct GraspCandidate {
    pub pose: RigidTransform,
    pub width: f64,
    pub source: CandidateSource,
}

#[derive(Serialize, Deserialize)]
struct GraspRecord {
    #[serde(with = "crate::serde_util::transform")]
    matrix: RigidTransform,
    width_m: f64,
    source: CandidateSource,
}

impl TryFrom<GraspRecord> for GraspCandidate {
    type Error = GraspError;

    fn try_from(r: GraspRecord) -> Result<Self, Self::Error> {
        GraspCandidate::new(r.matrix, r.width_m, r.source)
    }
}

impl From<GraspCandidate> for GraspRecord {
    fn from(c: GraspCandidate) -> Self {
        GraspRecord { matrix: c.pose, width_m: c.width, source: c.source }
    }
}

impl GraspCandidate {
    pub fn new(pose: RigidTransform, width: f64, source: CandidateSource) -> Result<Self, GraspError> {
        check_width(width)?;
        Ok(Self { pose, width, source })
    }

    /// Gripper centre `p_g` (the pose translation) and approach axis `v_g`
    /// (third rotation column).
    pub fn center_and_direction(&self) -> (Vec3, UnitVec3) {
        let v = self.pose.rotation.column(2);
        (self.pose.translation, UnitVec3::new_normalize(v))
    }
}

pub fn check_width(width: f64) -> Result<(), GraspError> {
    if width.is_finite() && width > 0.0 && width <= MAX_GRIPPER_WIDTH {
        Ok(())
    } else {
        Err(GraspError::WidthOutOfRange(width))
    }
}

/// How the alignment term enters the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosineMode {
    /// Signed cosine: anti-parallel approach scores lowest.
    #[default]
    Signed,
    /// Absolute cosine: perpendicular approach scores lowest.
    Absolute,
}

impl CosineMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CosineMode::Signed => "signed",
            CosineMode::Absolute => "absolute",
        }
    }
}

impl fmt::Display for CosineMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CosineMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "signed" => Ok(CosineMode::Signed),
            "absolute" => Ok(CosineMode::Absolute),
            other => Err(format!("unknown cosine mode '{other}' (signed | absolute)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    /// Distance weight, 1/m.
    pub lambda: f64,
    pub cosine_mode: CosineMode,
    /// Required gripper–hand clearance, meters.
    pub clearance: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { lambda: 1.0, cosine_mode: CosineMode::Signed, clearance: 0.005 }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<(), GraspError> {
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(GraspError::InvalidConfig(format!("lambda {} must be >= 0", self.lambda)));
        }
        if !self.clearance.is_finite() || self.clearance <= 0.0 {
            return Err(GraspError::InvalidConfig(format!("clearance {} must be > 0", self.clearance)));
        }
        Ok(())
    }
}

/// `cos(v_g, v_h) − λ‖p_g − p_h‖`, with `|cos|` in absolute mode. Lower is better.
pub fn score_candidate(v_g: &UnitVec3, p_g: &Vec3, v_h: &UnitVec3, p_h: &Vec3, cfg: &SelectionConfig) -> f64 {
    let cos = v_g.dot(v_h);
    let align = match cfg.cosine_mode {
        CosineMode::Signed => cos,
        CosineMode::Absolute => cos.abs(),
    };
    align - cfg.lambda * (p_g - p_h).norm()
}

/// Hand direction and centre used for scoring.
pub fn hand_reference(hand: &PosedHand) -> Result<(UnitVec3, Vec3), GraspError> {
    let v_h = hand_direction(&hand.joints)?;
    let p_h = geometric_center(&hand.vertices)?;
    Ok((v_h, p_h))
}

/// Candidate indices with their scores, best first; ties keep input order.
pub fn rank_candidates(
    candidates: &[GraspCandidate],
    v_h: &UnitVec3,
    p_h: &Vec3,
    cfg: &SelectionConfig,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (p_g, v_g) = c.center_and_direction();
            (i, score_candidate(&v_g, &p_g, v_h, p_h, cfg))
        })
        .collect();
    scored.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    scored
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub candidate: GraspCandidate,
    pub score: f64,
}

pub fn select_grasp(
    candidates: &[GraspCandidate],
    hand: &PosedHand,
    cfg: &SelectionConfig,
) -> Result<Selection, GraspError> {
    if candidates.is_empty() {
        return Err(GraspError::EmptyCandidateSet);
    }
    cfg.validate()?;
    let (v_h, p_h) = hand_reference(hand)?;
    let (index, score) = rank_candidates(candidates, &v_h, &p_h, cfg)[0];
    Ok(Selection { index, candidate: candidates[index], score })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sphere {
    #[serde(with = "crate::serde_util::vec3")]
    pub centre: Vec3,
    pub radius: f64,
}

/// Sphere-set collision proxy of the gripper, in gripper coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GripperGeometry {
    pub spheres: Vec<Sphere>,
}

impl GripperGeometry {
    pub fn new(spheres: Vec<Sphere>) -> Result<Self, GraspError> {
        let g = Self { spheres };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GraspError> {
        if self.spheres.is_empty() {
            return Err(GraspError::InvalidGeometry("no spheres".into()));
        }
        if self.spheres.iter().any(|s| !s.radius.is_finite() || s.radius <= 0.0) {
            return Err(GraspError::InvalidGeometry("radii must be positive".into()));
        }
        Ok(())
    }

    /// Spheres moved into the candidate's frame.
    pub fn placed(&self, pose: &RigidTransform) -> Vec<Sphere> {
        self.spheres
            .iter()
            .map(|s| Sphere { centre: pose.apply_point(&s.centre), radius: s.radius })
            .collect()
    }
}

impl Default for GripperGeometry {
    /// Rough proxy of a two-finger parallel gripper: fingers at full opening
    /// and a cylindrical body behind them.
    fn default() -> Self {
        let s = |x: f64, z: f64, radius: f64| Sphere { centre: Vec3::new(x, 0.0, z), radius };
        Self {
            spheres: vec![
                s(0.045, -0.010, 0.008),
                s(-0.045, -0.010, 0.008),
                s(0.045, -0.035, 0.010),
                s(-0.045, -0.035, 0.010),
                s(0.0, -0.075, 0.035),
                s(0.0, -0.120, 0.035),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Clearance {
    pub passed: bool,
    /// `min(‖centre − vertex‖ − radius)`, negative on penetration.
    pub min_distance: f64,
    pub sphere: usize,
    pub vertex: usize,
}

pub fn clearance_check(
    candidate: &GraspCandidate,
    geometry: &GripperGeometry,
    hand_vertices: &[Vec3],
    delta: f64,
) -> Clearance {
    let mut best = Clearance { passed: true, min_distance: f64::INFINITY, sphere: 0, vertex: 0 };
    for (si, s) in geometry.placed(&candidate.pose).iter().enumerate() {
        for (vi, v) in hand_vertices.iter().enumerate() {
            let d = (s.centre - v).norm() - s.radius;
            if d < best.min_distance {
                best.min_distance = d;
                best.sphere = si;
                best.vertex = vi;
            }
        }
    }
    best.passed = best.min_distance >= delta;
    best
}
