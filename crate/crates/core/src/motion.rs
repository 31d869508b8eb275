//! Collision checking of continuous motions between two configurations.
//!
//! A motion is sampled so that no point of the chain travels more than
//! `max_step` between samples. Every sample is then checked with clearances
//! grown by half that travel (and self-collision gaps by twice that), so a
//! motion accepted here is collision-free at every intermediate instant, not
//! only at the samples.

use crate::geometry::Vec3;
use crate::kinematics::{
    pose_map_free, pose_of, pose_self_collision_free, interpolate_unchecked, ChainParams, FullConfig, ShapeConfig,
};
use crate::map::OccupancyMap;

/// Minimum number of shape-space samples for a shape-changing motion.
pub const DEFAULT_TRANSITION_STEPS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    /// Lower bound on samples for motions that change the shape.
    pub min_steps: usize,
    /// Largest travel of any chain point between samples of a shape-changing
    /// motion, as a fraction of the voxel edge.
    pub max_step_fraction: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            min_steps: DEFAULT_TRANSITION_STEPS,
            max_step_fraction: 0.25,
        }
    }
}

/// Upper bound on the path length travelled by any point of the chain when
/// head and angles are interpolated linearly from `a` to `b`.
///
/// A link direction moves at speed at most `sqrt(dpitch^2 + dyaw^2)` under
/// linear angle interpolation, and unit `k` is the head minus a sum of
/// link vectors, so the last unit bounds every other point.
pub fn travel_bound(a: &FullConfig, b: &FullConfig, link_length: f64) -> f64 {
    let angular: f64 = a
        .shape
        .links
        .iter()
        .zip(&b.shape.links)
        .map(|(la, lb)| {
            let dp = crate::geometry::angle_diff(lb.pitch, la.pitch);
            let dy = crate::geometry::angle_diff(lb.yaw, la.yaw);
            (dp * dp + dy * dy).sqrt()
        })
        .sum();
    (b.head - a.head).norm() + link_length * angular
}

/// Rigid translation of `shape` from head position `from` to `to`.
///
/// Samples are spaced at most `r_v / 2`; the shape itself is assumed
/// self-collision-free.
pub fn translation_free(
    shape: &ShapeConfig,
    from: &Vec3,
    to: &Vec3,
    params: &ChainParams,
    map: &OccupancyMap,
) -> bool {
    let d = to - from;
    let len = d.norm();
    let max_step = map.resolution() / 2.0;
    let n = ((len / max_step).ceil() as usize).max(1);
    let s = len / n as f64;
    // Every point moves along a straight line, so the closest sample is
    // within sqrt(r^2 + (s/2)^2) of any ball centered between samples.
    let grow = |r: f64| (r * r + 0.25 * s * s).sqrt();
    let ru = grow(params.unit_radius);
    let rl = grow(params.link_radius);
    let base = pose_of(&Vec3::zeros(), shape, params.link_length);
    (0..=n).all(|k| {
        let head = from + d * (k as f64 / n as f64);
        let units = base.units.iter().map(|u| u + head).collect();
        pose_map_free(&crate::kinematics::ChainPose { units }, map, ru, rl)
    })
}

/// Motion where head position and shape are interpolated together (either
/// may stay fixed). Checks map clearance and self-collision.
pub fn motion_free(
    a: &FullConfig,
    b: &FullConfig,
    params: &ChainParams,
    map: &OccupancyMap,
    sweep: &SweepConfig,
) -> bool {
    let travel = travel_bound(a, b, params.link_length);
    let max_step = sweep.max_step_fraction * map.resolution();
    let n = sweep.min_steps.max((travel / max_step).ceil() as usize).max(1);
    let half = travel / (2.0 * n as f64);
    let ru = params.unit_radius + half;
    let rl = params.link_radius + half;
    (0..=n).all(|k| {
        let t = k as f64 / n as f64;
        let head = a.head + (b.head - a.head) * t;
        let shape = interpolate_unchecked(&a.shape, &b.shape, t);
        let pose = pose_of(&head, &shape, params.link_length);
        pose_self_collision_free(&pose, params, 2.0 * half) && pose_map_free(&pose, map, ru, rl)
    })
}
