//! Serde adapters writing vectors as plain `[x, y, z]` arrays.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geometry::{RigidTransform, UnitVec3, Vec3};

pub mod vec3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::from(a))
    }
}

pub mod unit_vec3 {
    use super::*;

    pub fn serialize<S: Serializer>(v: &UnitVec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<UnitVec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        let v = Vec3::from(a);
        let n = v.norm();
        if !(n - 1.0).abs().lt(&1e-6) {
            return Err(serde::de::Error::custom(format!("expected unit vector, norm {n}")));
        }
        Ok(UnitVec3::new_normalize(v))
    }
}

pub mod vec3_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec3], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|p| [p.x, p.y, p.z]))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec3>, D::Error> {
        let a = Vec::<[f64; 3]>::deserialize(d)?;
        Ok(a.into_iter().map(Vec3::from).collect())
    }
}

pub mod opt_vec3_list {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Option<Vec<Vec3>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(list) => s.collect_seq(list.iter().map(|p| [p.x, p.y, p.z])),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Vec3>>, D::Error> {
        let a = Option::<Vec<[f64; 3]>>::deserialize(d)?;
        Ok(a.map(|l| l.into_iter().map(Vec3::from).collect()))
    }
}

/// Rigid transform as a row-major 4x4 matrix of 16 numbers.
pub mod transform {
    use super::*;

    pub fn serialize<S: Serializer>(t: &RigidTransform, s: S) -> Result<S::Ok, S::Error> {
        t.to_row_major().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<RigidTransform, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        let a: [f64; 16] =
            v.try_into().map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"16 numbers"))?;
        RigidTransform::from_row_major(&a).map_err(serde::de::Error::custom)
    }
}
