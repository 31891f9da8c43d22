use nalgebra::{Matrix3, SymmetricEigen};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CloudError {
    #[error("object cloud is empty")]
    Empty,
    #[error("{normals} normals for {points} points")]
    NormalCount { points: usize, normals: usize },
    #[error("normal {index} is not unit length (norm {norm})")]
    NonUnitNormal { index: usize, norm: f64 },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("need at least {needed} points to estimate normals, have {have}")]
    TooFewForNormals { needed: usize, have: usize },
}

/// Object point cloud in the object frame, meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectCloud {
    pub name: String,
    #[serde(with = "crate::serde_util::vec3_list")]
    pub points: Vec<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_util::opt_vec3_list")]
    pub normals: Option<Vec<Vec3>>,
}

impl ObjectCloud {
    pub fn new(
        name: impl Into<String>,
        points: Vec<Vec3>,
        normals: Option<Vec<Vec3>>,
    ) -> Result<Self, CloudError> {
        let cloud = Self { name: name.into(), points, normals };
        cloud.validate()?;
        Ok(cloud)
    }

    pub fn validate(&self) -> Result<(), CloudError> {
        if self.points.is_empty() {
            return Err(CloudError::Empty);
        }
        if let Some(i) = self.points.iter().position(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(CloudError::NonFinite(i));
        }
        if let Some(normals) = &self.normals {
            if normals.len() != self.points.len() {
                return Err(CloudError::NormalCount { points: self.points.len(), normals: normals.len() });
            }
            for (index, n) in normals.iter().enumerate() {
                let norm = n.norm();
                if (norm - 1.0).abs() > 1e-6 || norm.is_nan() {
                    return Err(CloudError::NonUnitNormal { index, norm });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Vec3 {
        self.points.iter().fold(Vec3::zeros(), |a, p| a + p) / self.points.len() as f64
    }

    pub fn bounds(&self) -> (Vec3, Vec3) {
        let mut lo = Vec3::repeat(f64::INFINITY);
        let mut hi = Vec3::repeat(f64::NEG_INFINITY);
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (lo, hi)
    }

    /// Given normals, or PCA normals over the `k` nearest neighbours oriented
    /// away from the centroid.
    pub fn normals_or_estimate(&self, k: usize) -> Result<Vec<Vec3>, CloudError> {
        if let Some(n) = &self.normals {
            return Ok(n.clone());
        }
        estimate_normals(&self.points, k)
    }
}

pub fn estimate_normals(points: &[Vec3], k: usize) -> Result<Vec<Vec3>, CloudError> {
    let k = k.max(3);
    if points.len() < 3 {
        return Err(CloudError::TooFewForNormals { needed: 3, have: points.len() });
    }
    let centroid = points.iter().fold(Vec3::zeros(), |a, p| a + p) / points.len() as f64;
    let mut out = Vec::with_capacity(points.len());
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(points.len());
    for p in points {
        dist.clear();
        dist.extend(points.iter().enumerate().map(|(j, q)| ((q - p).norm_squared(), j)));
        let kk = k.min(points.len());
        dist.select_nth_unstable_by(kk - 1, |a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let nbrs = &dist[..kk];
        let mean = nbrs.iter().fold(Vec3::zeros(), |a, (_, j)| a + points[*j]) / kk as f64;
        let mut cov = Matrix3::zeros();
        for (_, j) in nbrs {
            let d = points[*j] - mean;
            cov += d * d.transpose();
        }
        let eig = SymmetricEigen::new(cov);
        let (imin, _) =
            eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("three eigenvalues");
        let mut n: Vec3 = eig.eigenvectors.column(imin).into_owned().normalize();
        if n.dot(&(p - centroid)) < 0.0 {
            n = -n;
        }
        out.push(n);
    }
    Ok(out)
}
