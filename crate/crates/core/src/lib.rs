//! Robot-to-human handover planning.
//!
//! A task request is resolved into an object and a receiving hand, a handover
//! configuration (object, posed hand, gripper) is imagined in the object
//! frame, and at execution time the imagined hand is matched to the observed
//! one to produce the gripper target.

pub mod cloud;
pub mod fixtures;
pub mod geometry;
pub mod grasp;
pub mod hand_model;
pub mod intent;
pub mod io;
pub mod pipeline;
pub mod registry;
pub mod serde_util;
