//! JSON container for hand model parameters. Numeric arrays are base64 of
//! little-endian float32 (faces: uint32), row-major.

use std::fs;
use std::path::Path;

use base64::engine::general_purpose::STANDARD;
use base64::Engine;
use serde::{Deserialize, Serialize};

use super::{HandModel, HandModelError, Handedness, NUM_KEYPOINTS, NUM_SHAPE, NUM_SKIN_JOINTS, NUM_VERTICES};
use crate::geometry::Vec3;
use crate::io::IoError;

pub const HAND_MODEL_SCHEMA: &str = "hand-model/1";

#[derive(Debug, Serialize, Deserialize)]
struct HandModelFile {
    schema: String,
    handedness: Handedness,
    template_vertices: String,
    weights: String,
    joint_regressor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    shape_dirs: Option<String>,
    parents: Vec<i32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    faces: Option<String>,
}

fn encode_f32(values: impl Iterator<Item = f64>) -> String {
    let bytes: Vec<u8> = values.flat_map(|v| (v as f32).to_le_bytes()).collect();
    STANDARD.encode(bytes)
}

fn decode_f32(field: &str, data: &str, expected: usize) -> Result<Vec<f64>, HandModelError> {
    let bytes =
        STANDARD.decode(data.trim()).map_err(|e| HandModelError::InvalidModel(format!("{field}: {e}")))?;
    if bytes.len() != expected * 4 {
        return Err(HandModelError::ModelMismatch(format!(
            "{field}: {} values, expected {expected}",
            bytes.len() / 4
        )));
    }
    Ok(bytes.chunks_exact(4).map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64).collect())
}

impl HandModel {
    pub fn to_json(&self) -> Result<String, HandModelError> {
        self.validate()?;
        let file = HandModelFile {
            schema: HAND_MODEL_SCHEMA.into(),
            handedness: self.handedness,
            template_vertices: encode_f32(self.template.iter().flat_map(|v| [v.x, v.y, v.z])),
            weights: encode_f32(self.weights.iter().flatten().copied()),
            joint_regressor: encode_f32(self.regressor.iter().flatten().copied()),
            shape_dirs: self.shape_dirs.as_ref().map(|dirs| {
                // layout: vertex, axis, component
                encode_f32(
                    dirs.iter().flat_map(|d| (0..3).flat_map(move |axis| d.iter().map(move |v| v[axis]))),
                )
            }),
            parents: self.parents.to_vec(),
            faces: (!self.faces.is_empty()).then(|| {
                let bytes: Vec<u8> = self.faces.iter().flatten().flat_map(|i| i.to_le_bytes()).collect();
                STANDARD.encode(bytes)
            }),
        };
        serde_json::to_string_pretty(&file).map_err(|e| HandModelError::InvalidModel(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<HandModel, HandModelError> {
        let file: HandModelFile =
            serde_json::from_str(text).map_err(|e| HandModelError::InvalidModel(e.to_string()))?;
        if file.schema != HAND_MODEL_SCHEMA {
            return Err(HandModelError::InvalidModel(format!("unsupported schema '{}'", file.schema)));
        }
        let verts = decode_f32("template_vertices", &file.template_vertices, NUM_VERTICES * 3)?;
        let template = verts.chunks_exact(3).map(|c| Vec3::new(c[0], c[1], c[2])).collect();
        let weights = decode_f32("weights", &file.weights, NUM_VERTICES * NUM_SKIN_JOINTS)?
            .chunks_exact(NUM_SKIN_JOINTS)
            .map(|row| {
                // float32 storage loses the exact row sum; restore it
                let s: f64 = row.iter().sum();
                row.iter().map(|w| w / s).collect()
            })
            .collect();
        let regressor = decode_f32("joint_regressor", &file.joint_regressor, NUM_KEYPOINTS * NUM_VERTICES)?
            .chunks_exact(NUM_VERTICES)
            .map(|r| r.to_vec())
            .collect();
        let shape_dirs = match &file.shape_dirs {
            None => None,
            Some(data) => {
                let raw = decode_f32("shape_dirs", data, NUM_VERTICES * 3 * NUM_SHAPE)?;
                Some(
                    raw.chunks_exact(3 * NUM_SHAPE)
                        .map(|c| {
                            let mut d = [Vec3::zeros(); NUM_SHAPE];
                            for (i, dir) in d.iter_mut().enumerate() {
                                *dir = Vec3::new(c[i], c[NUM_SHAPE + i], c[2 * NUM_SHAPE + i]);
                            }
                            d
                        })
                        .collect(),
                )
            }
        };
        let parents: [i32; NUM_SKIN_JOINTS] = file.parents.try_into().map_err(|p: Vec<i32>| {
            HandModelError::ModelMismatch(format!("{} parents, expected {NUM_SKIN_JOINTS}", p.len()))
        })?;
        let faces = match &file.faces {
            None => Vec::new(),
            Some(data) => {
                let bytes = STANDARD
                    .decode(data.trim())
                    .map_err(|e| HandModelError::InvalidModel(format!("faces: {e}")))?;
                if bytes.len() % 12 != 0 {
                    return Err(HandModelError::InvalidModel("faces: truncated".into()));
                }
                bytes
                    .chunks_exact(12)
                    .map(|c| {
                        let idx = |o: usize| u32::from_le_bytes([c[o], c[o + 1], c[o + 2], c[o + 3]]);
                        [idx(0), idx(4), idx(8)]
                    })
                    .collect()
            }
        };
        let model = HandModel {
            handedness: file.handedness,
            template,
            weights,
            regressor,
            shape_dirs,
            parents,
            faces,
        };
        model.validate()?;
        Ok(model)
    }
}

pub fn load_hand_model(path: &Path) -> Result<HandModel, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::read(path, e))?;
    HandModel::from_json(&text).map_err(|e| IoError::Invalid(format!("{}: {e}", path.display())))
}

pub fn save_hand_model(model: &HandModel, path: &Path) -> Result<(), IoError> {
    let text = model.to_json().map_err(|e| IoError::Invalid(e.to_string()))?;
    fs::write(path, text).map_err(|e| IoError::write(path, e))
}
