//! Wavefront OBJ polylines of the chain along a plan.

use std::fmt::Write as _;

use anyhow::Result;
use arcplan::kinematics::{forward_kinematics, interpolate};
use arcplan::planner::PlanResult;
use arcplan::{ChainParams, FullConfig};

/// One `l` polyline per sampled pose through the unit centers, plus the head
/// path. `steps` extra poses are interpolated between consecutive waypoints.
pub fn plan_to_obj(plan: &PlanResult, params: &ChainParams, steps: usize, comments: &[String]) -> Result<String> {
    let mut poses = Vec::new();
    for (i, w) in plan.waypoints.iter().enumerate() {
        if i > 0 {
            let a = &plan.waypoints[i - 1].config;
            for k in 1..=steps {
                let t = k as f64 / (steps + 1) as f64;
                poses.push(FullConfig::new(a.head + (w.config.head - a.head) * t, interpolate(&a.shape, &w.config.shape, t)?));
            }
        }
        poses.push(w.config.clone());
    }
    let mut out = String::from("# ARCPLAN geometry export\n");
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let mut next = 1;
    let mut heads = Vec::new();
    for (i, cfg) in poses.iter().enumerate() {
        let pose = forward_kinematics(cfg, params)?;
        let _ = writeln!(out, "o pose_{i}");
        heads.push(next);
        let ids: Vec<String> = pose
            .units
            .iter()
            .map(|u| {
                let _ = writeln!(out, "v {} {} {}", u.x, u.y, u.z);
                next += 1;
                (next - 1).to_string()
            })
            .collect();
        let _ = writeln!(out, "l {}", ids.join(" "));
    }
    if heads.len() > 1 {
        out.push_str("o head_path\n");
        let ids: Vec<String> = heads.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "l {}", ids.join(" "));
    }
    Ok(out)
}
