//! File formats: PLY clouds, OBJ scene export, and JSON records.

mod ply;
mod scene;

pub use ply::{load_ply, parse_ply, save_ply, write_ply, PlyEncoding};
pub use scene::{export_scene, scene_obj, SceneExport, SceneGroup};

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Vec3;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed PLY header: {0}")]
    MalformedHeader(String),
    #[error("unsupported PLY encoding: {0}")]
    UnsupportedEncoding(String),
    #[error("malformed PLY body: {0}")]
    MalformedBody(String),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl IoError {
    pub(crate) fn read(path: &Path, source: std::io::Error) -> Self {
        IoError::Read { path: path.to_path_buf(), source }
    }

    pub(crate) fn write(path: &Path, source: std::io::Error) -> Self {
        IoError::Write { path: path.to_path_buf(), source }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::read(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| IoError::Parse { path: path.to_path_buf(), message: e.to_string() })
}

/// Pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String, IoError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| IoError::Invalid(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    fs::write(path, to_json_string(value)?).map_err(|e| IoError::write(path, e))
}

/// Observed hand: 21 keypoints, optionally with a hand point cloud.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "ObservationFile")]
pub struct HandObservation {
    #[serde(with = "crate::serde_util::vec3_list")]
    pub joints: Vec<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "crate::serde_util::opt_vec3_list")]
    pub points: Option<Vec<Vec3>>,
}

/// Either a bare `[[x, y, z]; 21]` array or `{"joints": ..., "points": ...}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum ObservationFile {
    Bare(Vec<[f64; 3]>),
    Wrapped {
        joints: Vec<[f64; 3]>,
        #[serde(default)]
        points: Option<Vec<[f64; 3]>>,
    },
}

impl From<ObservationFile> for HandObservation {
    fn from(f: ObservationFile) -> Self {
        let conv = |v: Vec<[f64; 3]>| v.into_iter().map(Vec3::from).collect();
        match f {
            ObservationFile::Bare(j) => HandObservation { joints: conv(j), points: None },
            ObservationFile::Wrapped { joints, points } => {
                HandObservation { joints: conv(joints), points: points.map(conv) }
            }
        }
    }
}

impl HandObservation {
    pub fn keypoints(joints: Vec<Vec3>) -> Self {
        Self { joints, points: None }
    }
}

pub fn load_observation(path: &Path) -> Result<HandObservation, IoError> {
    read_json(path)
}
