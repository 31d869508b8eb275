//! Independent replay of a plan against exact clearance tests.

use super::{PlanResult, WaypointKind};
use crate::kinematics::{interpolate_unchecked, pose_of, pose_self_collision_free, ChainParams, ChainPose, FullConfig};
use crate::map::OccupancyMap;
use crate::motion::travel_bound;

/// Samples per shape-changing step.
pub const VERIFY_SHAPE_STEPS: usize = 64;
/// Spacing of link samples, meters.
const LINK_SAMPLE: f64 = 0.01;

pub fn verify_plan(result: &PlanResult, map: &OccupancyMap, params: &ChainParams) -> bool {
    verify_plan_report(result, map, params).is_ok()
}

/// Like [`verify_plan`] but names the first offending step.
pub fn verify_plan_report(result: &PlanResult, map: &OccupancyMap, params: &ChainParams) -> Result<(), String> {
    if !result.stats.success {
        return Err("plan is not marked successful".into());
    }
    let wps = &result.waypoints;
    let Some(first) = wps.first() else {
        return Err("plan has no waypoints".into());
    };
    if first.kind != WaypointKind::Start {
        return Err("first waypoint is not the start".into());
    }
    for (i, w) in wps.iter().enumerate() {
        if w.config.shape.n_units() != params.n_units {
            return Err(format!("waypoint {i} has the wrong number of units"));
        }
        if i > 0 && w.kind == WaypointKind::Start {
            return Err(format!("waypoint {i} is a second start"));
        }
    }
    if !pose_clear(&pose_of(&first.config.head, &first.config.shape, params.link_length), map, params) {
        return Err("start pose collides".into());
    }
    let quarter = map.resolution() / 4.0;
    for (i, pair) in wps.windows(2).enumerate() {
        let (a, b) = (&pair[0].config, &pair[1].config);
        let moved = a.head != b.head;
        let reshaped = a.shape != b.shape;
        let steps = match pair[1].kind {
            WaypointKind::Translation if reshaped => {
                return Err(format!("step {} changes shape during a translation", i + 1));
            }
            WaypointKind::Transition if moved => {
                return Err(format!("step {} moves the head during a shape transition", i + 1));
            }
            WaypointKind::Translation => ((b.head - a.head).norm() / quarter).ceil() as usize,
            WaypointKind::Transition => VERIFY_SHAPE_STEPS,
            WaypointKind::Combined => {
                VERIFY_SHAPE_STEPS.max((travel_bound(a, b, params.link_length) / quarter).ceil() as usize)
            }
            WaypointKind::Start => unreachable!(),
        };
        if !step_clear(a, b, steps.max(1), map, params) {
            return Err(format!("step {} collides", i + 1));
        }
    }
    Ok(())
}

fn step_clear(a: &FullConfig, b: &FullConfig, steps: usize, map: &OccupancyMap, params: &ChainParams) -> bool {
    (1..=steps).all(|k| {
        let t = k as f64 / steps as f64;
        let head = a.head + (b.head - a.head) * t;
        let shape = interpolate_unchecked(&a.shape, &b.shape, t);
        pose_clear(&pose_of(&head, &shape, params.link_length), map, params)
    })
}

fn pose_clear(pose: &ChainPose, map: &OccupancyMap, params: &ChainParams) -> bool {
    pose_self_collision_free(pose, params, 0.0)
        && pose.units.iter().all(|u| map.ball_clear_exact(u, params.unit_radius))
        && pose.links().all(|(p, q)| {
            let n = ((q - p).norm() / LINK_SAMPLE).ceil().max(1.0) as usize;
            (0..=n).all(|k| map.ball_clear_exact(&(p + (q - p) * (k as f64 / n as f64)), params.link_radius))
        })
}
