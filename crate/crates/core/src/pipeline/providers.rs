//! Sources of receiving-hand poses and grasp candidates.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{HandModels, PipelineError};
use crate::cloud::ObjectCloud;
use crate::geometry::{RotationMatrix, Vec3};
use crate::grasp::{antipodal_candidates, AntipodalParams, GraspCandidate};
use crate::hand_model::{lbs_forward, HandPose, Handedness, INDEX_BASE, NUM_SHAPE, PINKY_BASE, WRIST};
use crate::intent::TaskDescription;
use crate::io::{read_json, IoError};

/// Produces the receiving hand pose, in the object frame.
pub trait ReceivingHandProvider: Send + Sync {
    fn name(&self) -> &str;
    fn hand_pose(&self, task: &TaskDescription, cloud: &ObjectCloud) -> Result<HandPose, PipelineError>;
}

/// Produces gripper candidates, in the object frame.
pub trait GraspCandidateProvider: Send + Sync {
    fn name(&self) -> &str;
    fn candidates(
        &self,
        task: &TaskDescription,
        cloud: &ObjectCloud,
    ) -> Result<Vec<GraspCandidate>, PipelineError>;
}

/// Pose fields of a library entry; the handedness comes from its key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LibraryPose {
    pub translation: [f64; 3],
    pub pose: Vec<[f64; 6]>,
    #[serde(default)]
    pub shape: [f64; NUM_SHAPE],
}

impl LibraryPose {
    fn with_handedness(&self, handedness: Handedness) -> HandPose {
        HandPose { translation: self.translation, pose: self.pose.clone(), shape: self.shape, handedness }
    }
}

impl From<&HandPose> for LibraryPose {
    fn from(p: &HandPose) -> Self {
        Self { translation: p.translation, pose: p.pose.clone(), shape: p.shape }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LibraryEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<LibraryPose>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right: Option<LibraryPose>,
}

/// Canned poses keyed by object name, then handedness.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CannedPoseLibrary {
    pub entries: BTreeMap<String, LibraryEntry>,
}

impl CannedPoseLibrary {
    pub const NAME: &'static str = "canned";

    pub fn load(path: &Path) -> Result<Self, IoError> {
        read_json(path)
    }

    pub fn insert(&mut self, object: &str, pose: &HandPose) {
        let entry = self.entries.entry(object.to_string()).or_default();
        let slot = match pose.handedness {
            Handedness::Left => &mut entry.left,
            Handedness::Right => &mut entry.right,
        };
        *slot = Some(pose.into());
    }

    /// Exact name first, then a case-insensitive match.
    pub fn lookup(&self, object: &str, hand: Handedness) -> Option<HandPose> {
        let entry = self
            .entries
            .get(object)
            .or_else(|| self.entries.iter().find(|(k, _)| k.eq_ignore_ascii_case(object)).map(|(_, v)| v))?;
        let pose = match hand {
            Handedness::Left => entry.left.as_ref(),
            Handedness::Right => entry.right.as_ref(),
        }?;
        Some(pose.with_handedness(hand))
    }
}

impl ReceivingHandProvider for CannedPoseLibrary {
    fn name(&self) -> &str {
        Self::NAME
    }

    /// Looks up the task object, falling back to the cloud name.
    fn hand_pose(&self, task: &TaskDescription, cloud: &ObjectCloud) -> Result<HandPose, PipelineError> {
        self.lookup(&task.object, task.hand).or_else(|| self.lookup(&cloud.name, task.hand)).ok_or_else(
            || {
                PipelineError::ProviderEmpty(format!(
                    "no canned {} hand pose for '{}'",
                    task.hand, task.object
                ))
            },
        )
    }
}

/// Open hand, palm up, centred under the object with a fixed gap.
#[derive(Debug, Clone)]
pub struct PalmUpPlacement {
    pub models: Arc<HandModels>,
    /// Vertical gap between the top of the hand mesh and the object, meters.
    pub gap: f64,
}

impl PalmUpPlacement {
    pub const NAME: &'static str = "palm-up";

    pub fn new(models: Arc<HandModels>) -> Self {
        Self { models, gap: 0.03 }
    }
}

impl ReceivingHandProvider for PalmUpPlacement {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn hand_pose(&self, task: &TaskDescription, cloud: &ObjectCloud) -> Result<HandPose, PipelineError> {
        cloud.validate()?;
        let model = self.models.get(task.hand);
        // half turn about the finger axis turns the palm from −z to +z
        let root = RotationMatrix::rot_x(std::f64::consts::PI);
        let pose = HandPose::identity(task.hand).with_root(&root, Vec3::zeros());
        let posed = lbs_forward(model, &pose)?;
        let palm =
            [WRIST, INDEX_BASE, 9, 13, PINKY_BASE].iter().map(|&i| posed.joints[i]).sum::<Vec3>() / 5.0;
        let top = posed.vertices.iter().map(|v| v.z).fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = cloud.bounds();
        let centre = (lo + hi) * 0.5;
        let t = Vec3::new(centre.x - palm.x, centre.y - palm.y, lo.z - self.gap - top);
        Ok(pose.with_root(&root, t))
    }
}

/// Antipodal sampling on the object cloud.
#[derive(Debug, Clone, Default)]
pub struct AntipodalProvider {
    pub params: AntipodalParams,
}

impl AntipodalProvider {
    pub const NAME: &'static str = "antipodal";
}

impl GraspCandidateProvider for AntipodalProvider {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn candidates(
        &self,
        _task: &TaskDescription,
        cloud: &ObjectCloud,
    ) -> Result<Vec<GraspCandidate>, PipelineError> {
        Ok(antipodal_candidates(cloud, &self.params)?)
    }
}

/// A fixed candidate list; widths are checked when the list is read.
#[derive(Debug, Clone, Default)]
pub struct FileGraspProvider {
    pub candidates: Vec<GraspCandidate>,
}

impl FileGraspProvider {
    pub const NAME: &'static str = "file";

    pub fn load(path: &Path) -> Result<Self, IoError> {
        Ok(Self { candidates: read_json(path)? })
    }
}

impl GraspCandidateProvider for FileGraspProvider {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn candidates(
        &self,
        _task: &TaskDescription,
        _cloud: &ObjectCloud,
    ) -> Result<Vec<GraspCandidate>, PipelineError> {
        Ok(self.candidates.clone())
    }
}
