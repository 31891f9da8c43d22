//! Wavefront OBJ export of a handover configuration for viewing.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::IoError;
use crate::geometry::Vec3;
use crate::grasp::Sphere;
use crate::pipeline::HandoverConfiguration;

const OBJECT_COLOR: [f64; 3] = [0.60, 0.60, 0.65];
const HAND_COLOR: [f64; 3] = [0.90, 0.70, 0.55];
const GRIPPER_COLOR: [f64; 3] = [0.20, 0.40, 0.85];

const SPHERE_STACKS: usize = 8;
const SPHERE_SLICES: usize = 12;

/// One labelled mesh or point set. Faces index into `vertices`, zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneGroup {
    pub label: String,
    pub color: [f64; 3],
    pub vertices: Vec<Vec3>,
    pub normals: Option<Vec<Vec3>>,
    pub faces: Vec<[u32; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SceneExport {
    pub groups: Vec<SceneGroup>,
}

fn tessellate(sphere: &Sphere, verts: &mut Vec<Vec3>, faces: &mut Vec<[u32; 3]>) {
    use std::f64::consts::PI;
    let c = sphere.centre;
    let r = sphere.radius;
    let start = verts.len() as u32;
    verts.push(c + Vec3::new(0.0, 0.0, r));
    for i in 1..SPHERE_STACKS {
        let theta = PI * i as f64 / SPHERE_STACKS as f64;
        for j in 0..SPHERE_SLICES {
            let phi = 2.0 * PI * j as f64 / SPHERE_SLICES as f64;
            verts.push(c + r * Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()));
        }
    }
    verts.push(c - Vec3::new(0.0, 0.0, r));
    let ring = |i: usize, j: usize| start + 1 + ((i - 1) * SPHERE_SLICES + j % SPHERE_SLICES) as u32;
    let south = start + 1 + ((SPHERE_STACKS - 1) * SPHERE_SLICES) as u32;
    for j in 0..SPHERE_SLICES {
        faces.push([start, ring(1, j), ring(1, j + 1)]);
        faces.push([south, ring(SPHERE_STACKS - 1, j + 1), ring(SPHERE_STACKS - 1, j)]);
    }
    for i in 1..SPHERE_STACKS - 1 {
        for j in 0..SPHERE_SLICES {
            faces.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            faces.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
}

impl SceneExport {
    /// Object cloud, posed hand (meshed with `hand_faces` when given) and the
    /// gripper proxy spheres placed at the selected grasp.
    pub fn from_configuration(config: &HandoverConfiguration, hand_faces: &[[u32; 3]]) -> Self {
        let object = SceneGroup {
            label: "object".into(),
            color: OBJECT_COLOR,
            vertices: config.object.points.clone(),
            normals: config.object.normals.clone(),
            faces: Vec::new(),
        };
        let hand = SceneGroup {
            label: "hand".into(),
            color: HAND_COLOR,
            vertices: config.hand.vertices.clone(),
            normals: None,
            faces: hand_faces.to_vec(),
        };
        let mut verts = Vec::new();
        let mut faces = Vec::new();
        for s in config.gripper.placed(&config.grasp.pose) {
            tessellate(&s, &mut verts, &mut faces);
        }
        let gripper = SceneGroup {
            label: "gripper".into(),
            color: GRIPPER_COLOR,
            vertices: verts,
            normals: None,
            faces,
        };
        Self { groups: vec![object, hand, gripper] }
    }

    pub fn validate(&self) -> Result<(), IoError> {
        for (i, g) in self.groups.iter().enumerate() {
            if self.groups[..i].iter().any(|o| o.label == g.label) {
                return Err(IoError::Invalid(format!("duplicate scene label '{}'", g.label)));
            }
            if g.vertices.iter().any(|v| !v.iter().all(|x| x.is_finite())) {
                return Err(IoError::Invalid(format!("non-finite vertex in '{}'", g.label)));
            }
            if let Some(n) = &g.normals {
                if n.len() != g.vertices.len() {
                    return Err(IoError::Invalid(format!("normal count mismatch in '{}'", g.label)));
                }
            }
            let nv = g.vertices.len() as u32;
            if g.faces.iter().flatten().any(|&k| k >= nv) {
                return Err(IoError::Invalid(format!("face index out of range in '{}'", g.label)));
            }
        }
        Ok(())
    }

    /// OBJ text: `g` per group, `v x y z r g b`, `vn` only for groups with
    /// normals, faces when present and `p` point elements otherwise.
    pub fn to_obj(&self) -> Result<String, IoError> {
        self.validate()?;
        let mut out = String::from("# handover scene\n");
        let mut v_base = 1usize;
        let mut n_base = 1usize;
        for g in &self.groups {
            let [r, gr, b] = g.color;
            writeln!(out, "g {}", g.label).unwrap();
            for v in &g.vertices {
                writeln!(out, "v {:.6} {:.6} {:.6} {r:.3} {gr:.3} {b:.3}", v.x, v.y, v.z).unwrap();
            }
            if let Some(normals) = &g.normals {
                for n in normals {
                    writeln!(out, "vn {:.6} {:.6} {:.6}", n.x, n.y, n.z).unwrap();
                }
            }
            if g.faces.is_empty() {
                for i in 0..g.vertices.len() {
                    writeln!(out, "p {}", v_base + i).unwrap();
                }
            } else {
                for f in &g.faces {
                    let [a, b, c] = f.map(|k| v_base + k as usize);
                    if g.normals.is_some() {
                        let [na, nb, nc] = f.map(|k| n_base + k as usize);
                        writeln!(out, "f {a}//{na} {b}//{nb} {c}//{nc}").unwrap();
                    } else {
                        writeln!(out, "f {a} {b} {c}").unwrap();
                    }
                }
            }
            v_base += g.vertices.len();
            n_base += g.normals.as_ref().map_or(0, Vec::len);
        }
        Ok(out)
    }
}

pub fn scene_obj(config: &HandoverConfiguration, hand_faces: &[[u32; 3]]) -> Result<String, IoError> {
    SceneExport::from_configuration(config, hand_faces).to_obj()
}

pub fn export_scene(
    config: &HandoverConfiguration,
    hand_faces: &[[u32; 3]],
    path: &Path,
) -> Result<(), IoError> {
    let text = scene_obj(config, hand_faces)?;
    fs::write(path, text).map_err(|e| IoError::write(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(label: &str, normals: bool, faces: Vec<[u32; 3]>) -> SceneGroup {
        let vertices = vec![Vec3::zeros(), Vec3::x(), Vec3::y()];
        SceneGroup {
            label: label.into(),
            color: [1.0, 0.0, 0.0],
            normals: normals.then(|| vec![Vec3::z(); 3]),
            vertices,
            faces,
        }
    }

    #[test]
    fn omits_vn_without_normals() {
        let s = SceneExport { groups: vec![group("a", false, vec![])] };
        let obj = s.to_obj().unwrap();
        assert!(!obj.contains("vn "));
        assert_eq!(obj.lines().filter(|l| l.starts_with("p ")).count(), 3);
        let s = SceneExport { groups: vec![group("a", true, vec![[0, 1, 2]])] };
        assert!(s.to_obj().unwrap().contains("f 1//1 2//2 3//3"));
    }

    #[test]
    fn indices_offset_across_groups() {
        let s = SceneExport {
            groups: vec![group("a", false, vec![[0, 1, 2]]), group("b", false, vec![[0, 1, 2]])],
        };
        let obj = s.to_obj().unwrap();
        assert!(obj.contains("f 4 5 6"));
    }

    #[test]
    fn rejects_duplicate_labels_and_bad_faces() {
        let s = SceneExport { groups: vec![group("a", false, vec![]), group("a", false, vec![])] };
        assert!(s.to_obj().is_err());
        let s = SceneExport { groups: vec![group("a", false, vec![[0, 1, 3]])] };
        assert!(s.to_obj().is_err());
    }

    #[test]
    fn sphere_mesh_is_closed() {
        let mut v = Vec::new();
        let mut f = Vec::new();
        tessellate(&Sphere { centre: Vec3::new(1.0, 2.0, 3.0), radius: 0.5 }, &mut v, &mut f);
        assert_eq!(v.len(), 2 + (SPHERE_STACKS - 1) * SPHERE_SLICES);
        // closed triangulated sphere: F = 2V − 4
        assert_eq!(f.len(), 2 * v.len() - 4);
        for p in &v {
            assert!(((p - Vec3::new(1.0, 2.0, 3.0)).norm() - 0.5).abs() < 1e-12);
        }
    }
}
