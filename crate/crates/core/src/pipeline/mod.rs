//! Intent → imagined configuration → matching → end-effector target.
//!
//! Imagination happens entirely in the object frame. Only matching against an
//! observed hand moves into the world frame.

mod providers;

pub use providers::{
    AntipodalProvider, CannedPoseLibrary, FileGraspProvider, GraspCandidateProvider, LibraryEntry,
    LibraryPose, PalmUpPlacement, ReceivingHandProvider,
};

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cloud::{CloudError, ObjectCloud};
use crate::geometry::{
    matching_transform, transform_pose, FrameResiduals, HandFrame, RigidTransform, UnitQuaternion, Vec3,
    VERIFY_TOL,
};
use crate::grasp::{
    clearance_check, hand_reference, rank_candidates, CosineMode, GraspCandidate, GraspError,
    GripperGeometry, SelectionConfig, MAX_GRIPPER_WIDTH,
};
use crate::hand_model::{
    classify_handedness, frame_from_points, keypoint_frame_of, lbs_forward, synthetic_hand_model, HandModel,
    HandModelError, HandPose, Handedness, PosedHand, NUM_KEYPOINTS,
};
use crate::intent::TaskDescription;
use crate::io::{read_json, IoError};

pub const CONFIG_SCHEMA: &str = "handover-config/1";

/// Normal-angle tolerance for matched frames, radians.
pub const MATCH_ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("provider returned nothing: {0}")]
    ProviderEmpty(String),
    #[error("receiving hand is {expected}, but the {source_name} hand is {found}")]
    HandednessMismatch { expected: Handedness, found: Handedness, source_name: &'static str },
    #[error("all {} candidates collide with the hand (min distances {:?})", .0.len(), .0.iter().map(|c| c.1).collect::<Vec<_>>())]
    AllCandidatesCollide(Vec<(usize, f64)>),
    #[error("configuration failed validation: {}", .0.failures().join(", "))]
    ValidationFailed(Box<ValidationReport>),
    #[error("degenerate observation: {0}")]
    DegenerateObservation(String),
    #[error("matched frame residuals out of tolerance: {0:?}")]
    MatchingResidual(FrameResiduals),
    #[error("unsupported configuration schema '{0}'")]
    Schema(String),
    #[error(transparent)]
    Hand(#[from] HandModelError),
    #[error(transparent)]
    Grasp(#[from] GraspError),
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Left and right hand models.
#[derive(Debug, Clone)]
pub struct HandModels {
    pub left: HandModel,
    pub right: HandModel,
}

impl HandModels {
    /// Builds the missing hand by mirroring.
    pub fn from_model(model: HandModel) -> Self {
        let other = model.mirrored();
        match model.handedness {
            Handedness::Right => Self { right: model, left: other },
            Handedness::Left => Self { left: model, right: other },
        }
    }

    pub fn synthetic() -> Self {
        Self::from_model(synthetic_hand_model())
    }

    pub fn get(&self, hand: Handedness) -> &HandModel {
        match hand {
            Handedness::Left => &self.left,
            Handedness::Right => &self.right,
        }
    }
}

/// Limits checked by [`validate_configuration`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardwareLimits {
    pub max_width: f64,
    pub clearance: f64,
}

impl Default for HardwareLimits {
    fn default() -> Self {
        Self { max_width: MAX_GRIPPER_WIDTH, clearance: SelectionConfig::default().clearance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub limit: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    fn from_checks(checks: Vec<Check>) -> Self {
        Self { passed: checks.iter().all(|c| c.passed), checks }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{} ({} vs {})", c.name, c.value, c.limit))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RejectedCandidate {
    pub index: usize,
    pub score: f64,
    pub min_distance: f64,
}

/// How the grasp was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionRecord {
    pub hand_provider: String,
    pub grasp_provider: String,
    pub candidates: usize,
    pub index: usize,
    pub score: f64,
    pub min_distance: f64,
    pub cosine_mode: CosineMode,
    pub lambda: f64,
    /// Better-scoring candidates skipped for lack of clearance.
    pub rejected: Vec<RejectedCandidate>,
}

/// Object, receiving hand and gripper in the object frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandoverConfiguration {
    pub schema: String,
    pub task: TaskDescription,
    pub object: ObjectCloud,
    pub hand_pose: HandPose,
    pub hand: PosedHand,
    pub grasp: GraspCandidate,
    pub imagined_frame: HandFrame,
    pub gripper: GripperGeometry,
    pub selection: SelectionRecord,
    pub validation: ValidationReport,
}

impl HandoverConfiguration {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let config: Self = read_json(path)?;
        if config.schema != CONFIG_SCHEMA {
            return Err(PipelineError::Schema(config.schema));
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ImagineConfig {
    pub selection: SelectionConfig,
    pub gripper: GripperGeometry,
    pub limits: HardwareLimits,
}

/// Frame used for matching: keypoint centroid, so the imagined and observed
/// frames are built from the same kind of data.
pub fn imagined_frame(hand: &PosedHand) -> Result<HandFrame, HandModelError> {
    keypoint_frame_of(hand)
}

/// Poses the receiving hand, picks the best-scoring grasp that keeps clear of
/// it, and validates the result.
pub fn imagine_configuration(
    task: &TaskDescription,
    cloud: &ObjectCloud,
    hand_provider: &dyn ReceivingHandProvider,
    grasp_provider: &dyn GraspCandidateProvider,
    models: &HandModels,
    cfg: &ImagineConfig,
) -> Result<HandoverConfiguration, PipelineError> {
    cloud.validate()?;
    cfg.selection.validate()?;
    cfg.gripper.validate()?;

    let hand_pose = hand_provider.hand_pose(task, cloud)?;
    if hand_pose.handedness != task.hand {
        return Err(PipelineError::HandednessMismatch {
            expected: task.hand,
            found: hand_pose.handedness,
            source_name: "provided",
        });
    }
    let hand = lbs_forward(models.get(task.hand), &hand_pose)?;

    let candidates = grasp_provider.candidates(task, cloud)?;
    if candidates.is_empty() {
        return Err(PipelineError::ProviderEmpty(format!(
            "grasp provider '{}' returned no candidates",
            grasp_provider.name()
        )));
    }

    let (v_h, p_h) = hand_reference(&hand)?;
    let mut rejected = Vec::new();
    let mut chosen = None;
    for (index, score) in rank_candidates(&candidates, &v_h, &p_h, &cfg.selection) {
        let c = clearance_check(&candidates[index], &cfg.gripper, &hand.vertices, cfg.selection.clearance);
        if c.passed {
            chosen = Some((index, score, c.min_distance));
            break;
        }
        rejected.push(RejectedCandidate { index, score, min_distance: c.min_distance });
    }
    let Some((index, score, min_distance)) = chosen else {
        let mut all: Vec<(usize, f64)> = rejected.iter().map(|r| (r.index, r.min_distance)).collect();
        all.sort_by_key(|r| r.0);
        return Err(PipelineError::AllCandidatesCollide(all));
    };

    let imagined_frame = imagined_frame(&hand)?;
    let mut config = HandoverConfiguration {
        schema: CONFIG_SCHEMA.to_string(),
        task: task.clone(),
        object: cloud.clone(),
        hand_pose,
        hand,
        grasp: candidates[index],
        imagined_frame,
        gripper: cfg.gripper.clone(),
        selection: SelectionRecord {
            hand_provider: hand_provider.name().to_string(),
            grasp_provider: grasp_provider.name().to_string(),
            candidates: candidates.len(),
            index,
            score,
            min_distance,
            cosine_mode: cfg.selection.cosine_mode,
            lambda: cfg.selection.lambda,
            rejected,
        },
        validation: ValidationReport { passed: false, checks: Vec::new() },
    };
    let limits = HardwareLimits { clearance: cfg.selection.clearance, ..cfg.limits };
    config.validation = validate_configuration(&config, &limits);
    if !config.validation.passed {
        return Err(PipelineError::ValidationFailed(Box::new(config.validation)));
    }
    Ok(config)
}

/// Independent re-check of an assembled configuration.
pub fn validate_configuration(config: &HandoverConfiguration, limits: &HardwareLimits) -> ValidationReport {
    let mut checks = Vec::new();
    let mut push = |name: &str, passed: bool, value: f64, limit: f64| {
        checks.push(Check { name: name.to_string(), passed, value, limit });
    };

    let w = config.grasp.width;
    push("width", w.is_finite() && w > 0.0 && w <= limits.max_width, w, limits.max_width);

    let c = clearance_check(&config.grasp, &config.gripper, &config.hand.vertices, limits.clearance);
    push("clearance", c.passed, c.min_distance, limits.clearance);

    let r = &config.grasp.pose.rotation;
    let rot_err = r.orthogonality_error().max((r.determinant() - 1.0).abs());
    let t_ok = config.grasp.pose.translation.iter().all(|v| v.is_finite());
    push("grasp_rotation", t_ok && rot_err <= VERIFY_TOL, rot_err, VERIFY_TOL);

    let bad_blocks = config.hand_pose.local_rotations().map_or(f64::INFINITY, |_| 0.0);
    push("hand_pose_blocks", bad_blocks == 0.0, bad_blocks, 0.0);

    let hand_ok = config.hand.handedness == config.task.hand
        && config.hand_pose.handedness == config.task.hand
        && config.hand.joints.len() == NUM_KEYPOINTS;
    push("receiving_hand", hand_ok, if hand_ok { 0.0 } else { 1.0 }, 0.0);

    let frame_err = match imagined_frame(&config.hand) {
        Ok(f) => {
            let res = f.residuals(&config.imagined_frame);
            res.origin_distance.max(1.0 - res.direction_dot).max(res.normal_angle)
        }
        Err(_) => f64::INFINITY,
    };
    push("hand_frame", frame_err <= VERIFY_TOL, frame_err, VERIFY_TOL);

    ValidationReport::from_checks(checks)
}

/// Gripper target in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndEffectorTarget {
    #[serde(with = "crate::serde_util::vec3")]
    pub position: Vec3,
    pub orientation: UnitQuaternion,
    /// The matching transform that produced this target.
    #[serde(with = "crate::serde_util::transform")]
    pub matching: RigidTransform,
    pub real_frame: HandFrame,
    pub residuals: FrameResiduals,
}

impl EndEffectorTarget {
    pub fn pose(&self) -> RigidTransform {
        RigidTransform::new(self.orientation.to_rotation(), self.position)
    }
}

/// Carries the imagined gripper pose onto the observed hand.
pub fn match_to_observation(
    config: &HandoverConfiguration,
    observed: &[Vec3],
) -> Result<EndEffectorTarget, PipelineError> {
    if observed.len() != NUM_KEYPOINTS {
        return Err(PipelineError::DegenerateObservation(format!(
            "expected {NUM_KEYPOINTS} keypoints, got {}",
            observed.len()
        )));
    }
    if observed.iter().any(|p| !p.iter().all(|v| v.is_finite())) {
        return Err(PipelineError::DegenerateObservation("non-finite keypoint".into()));
    }
    let found =
        classify_handedness(observed).map_err(|e| PipelineError::DegenerateObservation(e.to_string()))?;
    if found != config.task.hand {
        return Err(PipelineError::HandednessMismatch {
            expected: config.task.hand,
            found,
            source_name: "observed",
        });
    }
    let real = frame_from_points(observed, observed, found)
        .map_err(|e| PipelineError::DegenerateObservation(e.to_string()))?;
    let imagined = &config.imagined_frame;
    let h = if real == *imagined { RigidTransform::identity() } else { matching_transform(imagined, &real) };
    let residuals = imagined.transformed(&h).residuals(&real);
    if !residuals.within(VERIFY_TOL, VERIFY_TOL, MATCH_ANGLE_TOL) {
        return Err(PipelineError::MatchingResidual(residuals));
    }
    let (position, orientation) =
        transform_pose(&config.grasp.pose.translation, &config.grasp.pose.quaternion(), &h);
    Ok(EndEffectorTarget { position, orientation, matching: h, real_frame: real, residuals })
}
