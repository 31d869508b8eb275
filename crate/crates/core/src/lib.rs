//! Planning for a chain of linked aerial units moving through voxel maps.
//!
//! Translation of the head unit is planned on a position roadmap; the shape of
//! the chain is chosen per roadmap edge, first from a small library of
//! engineered shapes and then from a precomputed roadmap of random shapes.
//! A full-state roadmap planner is included for comparison.

pub mod baseline;
pub mod connector;
pub mod error;
pub mod geometry;
pub mod graph;
pub mod kinematics;
pub mod lsc;
pub mod map;
pub mod motion;
pub mod planner;
pub mod srs;
pub mod translation;

pub use error::{Error, Result};
pub use geometry::Vec3;
pub use kinematics::{ChainParams, ChainPose, FullConfig, LinkAngles, ShapeConfig};
pub use map::OccupancyMap;
