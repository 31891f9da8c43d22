//! Deterministic antipodal pair sampler for a two-finger parallel gripper.

use std::collections::BTreeSet;

use nalgebra::Matrix3;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{CandidateSource, GraspCandidate, GraspError, MAX_GRIPPER_WIDTH};
use crate::cloud::ObjectCloud;
use crate::geometry::{RigidTransform, RotationMatrix, Vec3};

const NORMAL_NEIGHBOURS: usize = 12;
const MIN_PAIR_SEPARATION: f64 = 1e-4;
const DEGENERATE_OFFSET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AntipodalParams {
    pub max_width: f64,
    /// Half-angle of the friction cone, radians.
    pub friction_half_angle: f64,
    pub count: usize,
    pub seed: u64,
}

impl Default for AntipodalParams {
    fn default() -> Self {
        Self { max_width: MAX_GRIPPER_WIDTH, friction_half_angle: 0.3, count: 64, seed: 0 }
    }
}

/// Checks the antipodal condition for the ordered pair `(a, b)` and returns
/// its quality (the smaller of the two normal alignments).
pub(crate) fn pair_quality(
    pa: &Vec3,
    na: &Vec3,
    pb: &Vec3,
    nb: &Vec3,
    max_width: f64,
    cos_cone: f64,
) -> Option<f64> {
    let d = pb - pa;
    let dist = d.norm();
    if !(MIN_PAIR_SEPARATION..=max_width).contains(&dist) {
        return None;
    }
    let u = d / dist;
    // outward normals face away from each other along the closing line
    let qa = -na.dot(&u);
    let qb = nb.dot(&u);
    (qa >= cos_cone && qb >= cos_cone).then_some(qa.min(qb))
}

/// Samples up to `count` antipodal grasps from the cloud.
///
/// Anchors are visited in a seeded random order; each anchor takes its best
/// partner. Candidates are emitted sorted by point-index pair, so the output
/// depends only on the inputs and the seed.
pub fn antipodal_candidates(
    cloud: &ObjectCloud,
    params: &AntipodalParams,
) -> Result<Vec<GraspCandidate>, GraspError> {
    cloud.validate()?;
    if params.count == 0 || cloud.len() < 2 {
        return Err(GraspError::NoCandidatesFound);
    }
    let max_width = params.max_width.min(MAX_GRIPPER_WIDTH);
    let cos_cone = params.friction_half_angle.cos();
    let normals = cloud.normals_or_estimate(NORMAL_NEIGHBOURS)?;
    let points = &cloud.points;

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(params.seed));

    let mut pairs = BTreeSet::new();
    for &i in &order {
        if pairs.len() >= params.count {
            break;
        }
        let mut best: Option<(f64, usize)> = None;
        for j in 0..points.len() {
            if j == i {
                continue;
            }
            if let Some(q) =
                pair_quality(&points[i], &normals[i], &points[j], &normals[j], max_width, cos_cone)
            {
                if best.is_none_or(|(bq, _)| q > bq) {
                    best = Some((q, j));
                }
            }
        }
        if let Some((_, j)) = best {
            pairs.insert((i.min(j), i.max(j)));
        }
    }
    if pairs.is_empty() {
        return Err(GraspError::NoCandidatesFound);
    }

    let centroid = cloud.centroid();
    pairs
        .into_iter()
        .map(|(a, b)| {
            let (pose, width) = grasp_frame(points, a, b, &centroid, params.seed);
            GraspCandidate::new(pose, width, CandidateSource::AntipodalSampler)
        })
        .collect()
}

/// Closing axis along the pair, approach axis perpendicular to it and pointing
/// from outside the object towards the centroid, origin at the midpoint.
fn grasp_frame(points: &[Vec3], a: usize, b: usize, centroid: &Vec3, seed: u64) -> (RigidTransform, f64) {
    let d = points[b] - points[a];
    let width = d.norm();
    let x = d / width;
    let mid = (points[a] + points[b]) * 0.5;
    let inward = centroid - mid;
    let inward = inward - x * x.dot(&inward);
    let z = if inward.norm() > DEGENERATE_OFFSET {
        inward.normalize()
    } else {
        // midpoint on the centroid: any perpendicular works; pick one per pair
        let helper = if x.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
        let e1 = x.cross(&helper).normalize();
        let e2 = x.cross(&e1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((a as u64) << 32 | b as u64));
        let t: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        e1 * t.cos() + e2 * t.sin()
    };
    let y = z.cross(&x);
    let rotation = RotationMatrix::from_matrix_unchecked(Matrix3::from_columns(&[x, y, z]));
    (RigidTransform::new(rotation, mid), width)
}
