//! Rigid-body primitives: rotations, quaternions, hand frames and the
//! frame-matching transform that carries an imagined hand onto an observed one.
//!
//! Units are meters and radians. The world frame is right-handed with +z up.
//! Quaternions are Hamilton, scalar-first, and kept canonical (`w >= 0`).

use nalgebra::{Matrix3, Matrix4, Unit, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type UnitVec3 = Unit<Vector3<f64>>;

/// Tolerance used when checking that a value is a valid rotation or frame.
pub const VERIFY_TOL: f64 = 1e-9;
/// Tolerance used for constructed (normalized) quantities.
pub const CONSTRUCT_TOL: f64 = 1e-12;

const MIN_NORM: f64 = 1e-9;
const QUAT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate direction: vector norm {0:e} is too small")]
    DegenerateDirection(f64),
    #[error("direction and normal are parallel (|cos| = {0})")]
    ParallelAxes(f64),
    #[error("quaternion norm {0} deviates from 1")]
    NonUnitQuaternion(f64),
    #[error("matrix is not a proper rotation (orthogonality error {orthogonality:e}, det {det})")]
    InvalidRotation { orthogonality: f64, det: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}

pub(crate) fn normalize(v: &Vec3) -> Result<UnitVec3, GeometryError> {
    let n = v.norm();
    if !n.is_finite() {
        return Err(GeometryError::NonFinite("vector"));
    }
    if n <= MIN_NORM {
        return Err(GeometryError::DegenerateDirection(n));
    }
    Ok(Unit::new_unchecked(v / n))
}

/// A proper orthonormal 3x3 matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Validates orthonormality and `det = +1` at [`VERIFY_TOL`].
    pub fn try_from_matrix(m: Matrix3<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("rotation"));
        }
        let orthogonality = (m.transpose() * m - Matrix3::identity()).norm();
        let det = m.determinant();
        if orthogonality > VERIFY_TOL || (det - 1.0).abs() > VERIFY_TOL {
            return Err(GeometryError::InvalidRotation { orthogonality, det });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    pub fn from_columns(a: &Vec3, b: &Vec3, c: &Vec3) -> Result<Self, GeometryError> {
        Self::try_from_matrix(Matrix3::from_columns(&[*a, *b, *c]))
    }

    /// Rotation of `angle` radians about `axis` (Rodrigues).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Result<Self, GeometryError> {
        let k = normalize(axis)?;
        let (s, c) = angle.sin_cos();
        let kx = k.cross_matrix();
        let m = Matrix3::identity() + kx * s + kx * kx * (1.0 - c);
        Ok(Self(m))
    }

    pub fn rot_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn rot_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rot_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn column(&self, i: usize) -> Vec3 {
        self.0.column(i).into_owned()
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    pub fn compose(&self, rhs: &RotationMatrix) -> Self {
        Self(self.0 * rhs.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Frobenius norm of `RᵀR − I`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    pub fn determinant(&self) -> f64 {
        self.0.determinant()
    }

    pub fn to_quaternion(&self) -> UnitQuaternion {
        UnitQuaternion::from_rotation(self)
    }

    /// Encodes the rotation as its first two columns, `(c1, c2)`.
    pub fn to_rot6d(&self) -> [f64; 6] {
        let a = self.column(0);
        let b = self.column(1);
        [a.x, a.y, a.z, b.x, b.y, b.z]
    }

    /// Decodes a 6D rotation by Gram–Schmidt on its two 3-vectors.
    ///
    /// Any pair of non-degenerate, non-parallel vectors yields a proper rotation.
    pub fn from_rot6d(r6: &[f64; 6]) -> Result<Self, GeometryError> {
        let v1 = Vec3::new(r6[0], r6[1], r6[2]);
        let v2 = Vec3::new(r6[3], r6[4], r6[5]);
        let b1 = normalize(&v1)?;
        let v2n = normalize(&v2)?;
        let cos = b1.dot(&v2n);
        if cos.abs() >= 1.0 - MIN_NORM {
            return Err(GeometryError::ParallelAxes(cos.abs()));
        }
        let b2 = normalize(&(v2 - b1.as_ref() * b1.dot(&v2)))?;
        let b3 = b1.cross(&b2);
        Ok(Self(Matrix3::from_columns(&[b1.into_inner(), b2.into_inner(), b3])))
    }
}

/// Unit quaternion, Hamilton convention, scalar first, canonical `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitQuaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitQuaternion {
    pub fn identity() -> Self {
        Self { w: 1.0, x: 0.0, y: 0.0, z: 0.0 }
    }

    /// Accepts inputs whose norm is within 1e-6 of one, then renormalizes and
    /// canonicalizes the sign.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Result<Self, GeometryError> {
        let n = (w * w + x * x + y * y + z * z).sqrt();
        if !n.is_finite() {
            return Err(GeometryError::NonFinite("quaternion"));
        }
        if (n - 1.0).abs() > QUAT_NORM_TOL {
            return Err(GeometryError::NonUnitQuaternion(n));
        }
        Ok(Self { w: w / n, x: x / n, y: y / n, z: z / n }.canonical())
    }

    fn canonical(self) -> Self {
        if self.w < 0.0 {
            Self { w: -self.w, x: -self.x, y: -self.y, z: -self.z }
        } else {
            self
        }
    }

    fn renormalized(self) -> Self {
        let n = self.norm();
        Self { w: self.w / n, x: self.x / n, y: self.y / n, z: self.z / n }.canonical()
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn as_vector(&self) -> Vector4<f64> {
        Vector4::new(self.w, self.x, self.y, self.z)
    }

    /// Hamilton product `self ⊗ rhs`; `R(a ⊗ b) = R(a)·R(b)`.
    pub fn mul(&self, rhs: &UnitQuaternion) -> UnitQuaternion {
        let (a, b) = (self, rhs);
        Self {
            w: a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            x: a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            y: a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            z: a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        }
        .renormalized()
    }

    pub fn inverse(&self) -> UnitQuaternion {
        Self { w: self.w, x: -self.x, y: -self.y, z: -self.z }.canonical()
    }

    pub fn to_rotation(&self) -> RotationMatrix {
        let Self { w, x, y, z } = *self;
        let m = Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        );
        RotationMatrix(m)
    }

    /// Shepperd's method: branch on the largest of the trace and diagonal.
    pub fn from_rotation(r: &RotationMatrix) -> UnitQuaternion {
        let m = r.matrix();
        let trace = m[(0, 0)] + m[(1, 1)] + m[(2, 2)];
        let q = if trace > m[(0, 0)] && trace > m[(1, 1)] && trace > m[(2, 2)] {
            let s = 2.0 * (1.0 + trace).sqrt();
            Self {
                w: 0.25 * s,
                x: (m[(2, 1)] - m[(1, 2)]) / s,
                y: (m[(0, 2)] - m[(2, 0)]) / s,
                z: (m[(1, 0)] - m[(0, 1)]) / s,
            }
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt();
            Self {
                w: (m[(2, 1)] - m[(1, 2)]) / s,
                x: 0.25 * s,
                y: (m[(0, 1)] + m[(1, 0)]) / s,
                z: (m[(0, 2)] + m[(2, 0)]) / s,
            }
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = 2.0 * (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt();
            Self {
                w: (m[(0, 2)] - m[(2, 0)]) / s,
                x: (m[(0, 1)] + m[(1, 0)]) / s,
                y: 0.25 * s,
                z: (m[(1, 2)] + m[(2, 1)]) / s,
            }
        } else {
            let s = 2.0 * (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt();
            Self {
                w: (m[(1, 0)] - m[(0, 1)]) / s,
                x: (m[(0, 2)] + m[(2, 0)]) / s,
                y: (m[(1, 2)] + m[(2, 1)]) / s,
                z: 0.25 * s,
            }
        };
        q.renormalized()
    }

    /// Equality up to the double cover.
    pub fn angle_to(&self, other: &UnitQuaternion) -> f64 {
        let d = self.as_vector().dot(&other.as_vector()).abs().min(1.0);
        2.0 * d.acos()
    }
}

/// An element of SE(3): `x ↦ R·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    pub rotation: RotationMatrix,
    pub translation: Vec3,
}

impl RigidTransform {
    pub fn new(rotation: RotationMatrix, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    pub fn identity() -> Self {
        Self::new(RotationMatrix::identity(), Vec3::zeros())
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self::new(RotationMatrix::identity(), t)
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation.apply(v)
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &RigidTransform) -> RigidTransform {
        RigidTransform {
            rotation: self.rotation.compose(&rhs.rotation),
            translation: self.rotation.apply(&rhs.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidTransform {
        let rt = self.rotation.transpose();
        RigidTransform { rotation: rt, translation: -rt.apply(&self.translation) }
    }

    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut m = Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Reads a 4x4 homogeneous matrix given row-major. The bottom row must be
    /// `[0, 0, 0, 1]` and the rotation block must be valid.
    pub fn from_row_major(values: &[f64; 16]) -> Result<RigidTransform, GeometryError> {
        let m = Matrix4::from_row_slice(values);
        let bottom = [m[(3, 0)], m[(3, 1)], m[(3, 2)], m[(3, 3)]];
        if (bottom[0].abs() + bottom[1].abs() + bottom[2].abs() + (bottom[3] - 1.0).abs()) > VERIFY_TOL {
            return Err(GeometryError::InvalidRotation { orthogonality: f64::NAN, det: f64::NAN });
        }
        let rotation = RotationMatrix::try_from_matrix(m.fixed_view::<3, 3>(0, 0).into_owned())?;
        let translation: Vec3 = m.fixed_view::<3, 1>(0, 3).into_owned();
        if translation.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("translation"));
        }
        Ok(RigidTransform { rotation, translation })
    }

    pub fn to_row_major(&self) -> [f64; 16] {
        let m = self.to_homogeneous();
        let mut out = [0.0; 16];
        for r in 0..4 {
            for c in 0..4 {
                out[r * 4 + c] = m[(r, c)];
            }
        }
        out
    }

    pub fn quaternion(&self) -> UnitQuaternion {
        self.rotation.to_quaternion()
    }
}

/// Hand coordinate frame: origin at the hand centre, +x along the hand
/// direction, +z along the outward palm normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HandFrameRecord", into = "HandFrameRecord")]
pub struct HandFrame {
    centre: Vec3,
    direction: UnitVec3,
    normal: UnitVec3,
}

impl HandFrame {
    /// Builds a frame from a centre, a direction and a palm normal.
    ///
    /// The normal is orthogonalized against the direction, and the rotation
    /// is `[a, p×a, p]` with `a` the normalized direction.
    pub fn build(centre: Vec3, direction: Vec3, normal: Vec3) -> Result<Self, GeometryError> {
        if centre.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite("frame centre"));
        }
        let a = normalize(&direction)?;
        let p = normalize(&normal)?;
        let cos = a.dot(&p);
        if cos.abs() >= 1.0 - MIN_NORM {
            return Err(GeometryError::ParallelAxes(cos.abs()));
        }
        let p = normalize(&(p.as_ref() - a.as_ref() * cos))?;
        Ok(Self { centre, direction: a, normal: p })
    }

    pub fn centre(&self) -> Vec3 {
        self.centre
    }

    pub fn direction(&self) -> UnitVec3 {
        self.direction
    }

    pub fn normal(&self) -> UnitVec3 {
        self.normal
    }

    pub fn rotation(&self) -> RotationMatrix {
        let a = self.direction.into_inner();
        let p = self.normal.into_inner();
        RotationMatrix(Matrix3::from_columns(&[a, p.cross(&a), p]))
    }

    /// Frame pose as a transform from frame coordinates to the parent frame.
    pub fn transform(&self) -> RigidTransform {
        RigidTransform::new(self.rotation(), self.centre)
    }

    /// Maps the frame through a rigid transform.
    pub fn transformed(&self, h: &RigidTransform) -> HandFrame {
        HandFrame {
            centre: h.apply_point(&self.centre),
            direction: Unit::new_normalize(h.apply_vector(&self.direction)),
            normal: Unit::new_normalize(h.apply_vector(&self.normal)),
        }
    }

    /// Residuals of `self` against `other`: origin distance, direction dot
    /// product and normal angle.
    pub fn residuals(&self, other: &HandFrame) -> FrameResiduals {
        let cos_n = self.normal.dot(&other.normal).clamp(-1.0, 1.0);
        FrameResiduals {
            origin_distance: (self.centre - other.centre).norm(),
            direction_dot: self.direction.dot(&other.direction),
            normal_angle: cos_n.acos(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct HandFrameRecord {
    #[serde(with = "crate::serde_util::vec3")]
    centre: Vec3,
    #[serde(with = "crate::serde_util::vec3")]
    direction: Vec3,
    #[serde(with = "crate::serde_util::vec3")]
    normal: Vec3,
}

impl TryFrom<HandFrameRecord> for HandFrame {
    type Error = GeometryError;

    fn try_from(r: HandFrameRecord) -> Result<Self, Self::Error> {
        HandFrame::build(r.centre, r.direction, r.normal)
    }
}

impl From<HandFrame> for HandFrameRecord {
    fn from(f: HandFrame) -> Self {
        HandFrameRecord {
            centre: f.centre,
            direction: f.direction.into_inner(),
            normal: f.normal.into_inner(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameResiduals {
    pub origin_distance: f64,
    pub direction_dot: f64,
    pub normal_angle: f64,
}

impl FrameResiduals {
    /// Matching conditions: coincident origins, aligned directions, aligned normals.
    pub fn within(&self, origin_tol: f64, dot_tol: f64, angle_tol: f64) -> bool {
        self.origin_distance <= origin_tol
            && self.direction_dot >= 1.0 - dot_tol
            && self.normal_angle <= angle_tol
    }
}

/// The transform `H` with rotation `R2·R1ᵀ` and translation `c2 − R2·R1ᵀ·c1`
/// that carries the imagined frame onto the real one.
pub fn matching_transform(imagined: &HandFrame, real: &HandFrame) -> RigidTransform {
    let rotation = real.rotation().compose(&imagined.rotation().transpose());
    let translation = real.centre - rotation.apply(&imagined.centre);
    RigidTransform::new(rotation, translation)
}

/// Moves an end-effector pose `(p0, q0)` by `h`.
///
/// The orientation is left-multiplied, so `R(q̂) = H.rotation · R(q0)`.
pub fn transform_pose(p0: &Vec3, q0: &UnitQuaternion, h: &RigidTransform) -> (Vec3, UnitQuaternion) {
    let p = h.apply_point(p0);
    let q = h.quaternion().mul(q0);
    (p, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    fn assert_mat_eq(a: &Matrix3<f64>, b: &Matrix3<f64>, tol: f64) {
        assert!((a - b).norm() <= tol, "{a} != {b}");
    }

    #[test]
    fn canonical_frame_is_identity() {
        let f = HandFrame::build(Vec3::zeros(), Vec3::x(), Vec3::z()).unwrap();
        assert_mat_eq(f.rotation().matrix(), &Matrix3::identity(), 0.0);
        assert_eq!(f.centre(), Vec3::zeros());
    }

    #[test]
    fn frame_axis_permutation() {
        let f = HandFrame::build(Vec3::new(1.0, 2.0, 3.0), Vec3::y(), Vec3::z()).unwrap();
        let r = f.rotation();
        assert_eq!(r.column(0), Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(r.column(1), Vec3::new(-1.0, 0.0, 0.0));
        assert_eq!(r.column(2), Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(f.transform().translation, Vec3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn frame_orthogonalizes_normal() {
        let p = Vec3::new(1.0, 0.0, 1.0) / 2f64.sqrt();
        let f = HandFrame::build(Vec3::zeros(), Vec3::x(), p).unwrap();
        assert_relative_eq!(f.normal().into_inner(), Vec3::z(), epsilon = 1e-15);
        assert_mat_eq(f.rotation().matrix(), &Matrix3::identity(), 1e-15);
    }

    #[test]
    fn frame_errors() {
        assert!(matches!(
            HandFrame::build(Vec3::zeros(), Vec3::zeros(), Vec3::z()),
            Err(GeometryError::DegenerateDirection(_))
        ));
        assert!(matches!(
            HandFrame::build(Vec3::zeros(), Vec3::x(), Vec3::zeros()),
            Err(GeometryError::DegenerateDirection(_))
        ));
        assert!(matches!(
            HandFrame::build(Vec3::zeros(), Vec3::x(), Vec3::new(-2.0, 0.0, 0.0)),
            Err(GeometryError::ParallelAxes(_))
        ));
    }

    #[test]
    fn matching_identity_and_rotation() {
        let f = HandFrame::build(Vec3::new(0.3, -0.1, 0.2), Vec3::new(1.0, 2.0, 0.5), Vec3::z()).unwrap();
        let h = matching_transform(&f, &f);
        assert_mat_eq(h.rotation.matrix(), &Matrix3::identity(), 1e-15);
        assert!(h.translation.norm() < 1e-15);

        let imagined = HandFrame::build(Vec3::zeros(), Vec3::x(), Vec3::z()).unwrap();
        let real = HandFrame::build(Vec3::new(0.5, 0.0, 0.0), Vec3::y(), Vec3::z()).unwrap();
        let h = matching_transform(&imagined, &real);
        assert_mat_eq(h.rotation.matrix(), RotationMatrix::rot_z(FRAC_PI_2).matrix(), 1e-15);
        assert_eq!(h.translation, Vec3::new(0.5, 0.0, 0.0));
    }

    #[test]
    fn transform_pose_examples() {
        let q0 = UnitQuaternion::new(0.9, 0.1, -0.3, 0.2).unwrap_err();
        assert!(matches!(q0, GeometryError::NonUnitQuaternion(_)));

        let p0 = Vec3::new(0.2, 0.1, -0.4);
        let q0 = RotationMatrix::rot_x(0.4).to_quaternion();
        let (p, q) = transform_pose(&p0, &q0, &RigidTransform::identity());
        assert_eq!(p, p0);
        assert!(q.angle_to(&q0) < 1e-12);

        let h = RigidTransform::new(RotationMatrix::rot_z(FRAC_PI_2), Vec3::new(0.0, 0.0, 1.0));
        let (p, q) = transform_pose(&Vec3::x(), &UnitQuaternion::identity(), &h);
        assert_relative_eq!(p, Vec3::new(0.0, 1.0, 1.0), epsilon = 1e-15);
        let expected = UnitQuaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2).unwrap();
        assert_relative_eq!(q.as_vector(), expected.as_vector(), epsilon = 1e-15);
    }

    #[test]
    fn rot6d_examples() {
        let r = RotationMatrix::from_rot6d(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(*r.matrix(), Matrix3::identity());
        let r = RotationMatrix::from_rot6d(&[0.0, 1.0, 0.0, -1.0, 0.0, 0.0]).unwrap();
        assert_mat_eq(r.matrix(), RotationMatrix::rot_z(FRAC_PI_2).matrix(), 1e-15);
        let r = RotationMatrix::from_rot6d(&[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]).unwrap();
        assert_eq!(*r.matrix(), Matrix3::identity());
        assert!(matches!(RotationMatrix::from_rot6d(&[0.0; 6]), Err(GeometryError::DegenerateDirection(_))));
        assert!(matches!(
            RotationMatrix::from_rot6d(&[1.0, 0.0, 0.0, 3.0, 0.0, 0.0]),
            Err(GeometryError::ParallelAxes(_))
        ));
    }

    #[test]
    fn quaternion_matrix_examples() {
        assert_eq!(*UnitQuaternion::identity().to_rotation().matrix(), Matrix3::identity());
        assert_eq!(UnitQuaternion::from_rotation(&RotationMatrix::identity()), UnitQuaternion::identity());
        let q = UnitQuaternion::new(FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2).unwrap();
        assert_mat_eq(q.to_rotation().matrix(), RotationMatrix::rot_z(FRAC_PI_2).matrix(), 1e-15);
        let back = RotationMatrix::rot_z(FRAC_PI_2).to_quaternion();
        assert_relative_eq!(back.as_vector(), q.as_vector(), epsilon = 1e-15);
    }

    #[test]
    fn quaternion_canonical_sign() {
        let q = UnitQuaternion::new(-0.5, 0.5, 0.5, 0.5).unwrap();
        assert!(q.w > 0.0);
        // rotation by pi: w = 0 is kept as is
        let r = RotationMatrix::rot_x(std::f64::consts::PI);
        let q = r.to_quaternion();
        assert!(q.w.abs() < 1e-15);
        assert_mat_eq(q.to_rotation().matrix(), r.matrix(), 1e-15);
    }

    #[test]
    fn rejects_reflection() {
        let m = Matrix3::from_diagonal(&Vec3::new(-1.0, 1.0, 1.0));
        assert!(matches!(RotationMatrix::try_from_matrix(m), Err(GeometryError::InvalidRotation { .. })));
    }

    #[test]
    fn homogeneous_round_trip() {
        let h = RigidTransform::new(RotationMatrix::rot_y(0.3), Vec3::new(1.0, -2.0, 0.5));
        let back = RigidTransform::from_row_major(&h.to_row_major()).unwrap();
        assert_eq!(back, h);
        let mut bad = h.to_row_major();
        bad[12] = 1.0;
        assert!(RigidTransform::from_row_major(&bad).is_err());
    }
}
