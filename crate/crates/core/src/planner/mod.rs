//! Decoupled planner: a head-position roadmap path whose edges are made
//! traversable one at a time by choosing chain shapes.
//!
//! For every edge the current shape is tried first, then library shapes in
//! all azimuth rotations by increasing transition cost, then a transition
//! sequence through the random-shape roadmap. An edge no shape can traverse
//! is removed from the position roadmap and the path is re-queried from the
//! current vertex.

mod io;
mod verify;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

pub use io::{load_plan, plan_from_str, plan_to_string, save_plan, stats_csv_header, stats_csv_row, PLAN_HEADER};
pub use verify::{verify_plan, verify_plan_report};

use crate::connector::{srs_connect_with, ShapeNeighbors};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::kinematics::{
    chain_collision_free, cost_unchecked, rotate_azimuth, self_collision_free, ChainParams, FullConfig, ShapeConfig,
};
use crate::lsc::{ShapeLibrary, ShapeTag};
use crate::map::OccupancyMap;
use crate::motion::{motion_free, translation_free, SweepConfig};
use crate::srs::ShapeRoadmap;
use crate::translation::{build_translation_roadmap, TranslationRoadmap, ATTACH_K};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanMode {
    /// Library shapes, then random-shape connection.
    Both,
    LscOnly,
    SrsOnly,
    /// Full-state roadmap baseline.
    FullState,
}

impl PlanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::Both => "both",
            PlanMode::LscOnly => "lsc_only",
            PlanMode::SrsOnly => "srs_only",
            PlanMode::FullState => "fullstate",
        }
    }

    fn uses_library(self) -> bool {
        matches!(self, PlanMode::Both | PlanMode::LscOnly)
    }

    fn uses_srs(self) -> bool {
        matches!(self, PlanMode::Both | PlanMode::SrsOnly)
    }
}

impl fmt::Display for PlanMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlanMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "both" | "full" => Ok(PlanMode::Both),
            "lsc_only" => Ok(PlanMode::LscOnly),
            "srs_only" => Ok(PlanMode::SrsOnly),
            "fullstate" => Ok(PlanMode::FullState),
            other => Err(Error::InvalidParameter(format!("unknown planner mode `{other}`"))),
        }
    }
}

/// Where the shape held along a plan step came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShapeSource {
    Start,
    /// Library entry rotated by `rotation * 2 pi / n_psi`.
    Library { tag: ShapeTag, rotation: usize },
    Srs(usize),
    /// Sampled by the full-state baseline.
    Sampled,
}

impl fmt::Display for ShapeSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSource::Start => f.write_str("start"),
            ShapeSource::Library { tag, rotation } => write!(f, "{tag}@{rotation}"),
            ShapeSource::Srs(i) => write!(f, "srs@{i}"),
            ShapeSource::Sampled => f.write_str("sampled"),
        }
    }
}

impl FromStr for ShapeSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad shape source `{s}`"));
        match s {
            "start" => return Ok(ShapeSource::Start),
            "sampled" => return Ok(ShapeSource::Sampled),
            _ => {}
        }
        let (head, idx) = s.split_once('@').ok_or_else(bad)?;
        let idx: usize = idx.parse().map_err(|_| bad())?;
        if head == "srs" {
            Ok(ShapeSource::Srs(idx))
        } else {
            Ok(ShapeSource::Library {
                tag: head.parse().map_err(|_| bad())?,
                rotation: idx,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaypointKind {
    Start,
    /// Shape change with the head held still.
    Transition,
    /// Rigid translation of the head with the shape held.
    Translation,
    /// Head and shape interpolated together (full-state baseline only).
    Combined,
}

impl WaypointKind {
    pub fn tag(self) -> &'static str {
        match self {
            WaypointKind::Start => "S",
            WaypointKind::Transition => "R",
            WaypointKind::Translation => "T",
            WaypointKind::Combined => "C",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s {
            "S" => Some(WaypointKind::Start),
            "R" => Some(WaypointKind::Transition),
            "T" => Some(WaypointKind::Translation),
            "C" => Some(WaypointKind::Combined),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub kind: WaypointKind,
    pub config: FullConfig,
    pub source: ShapeSource,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanStats {
    /// Roadmap construction time, seconds.
    pub t_g: f64,
    /// Planning time after the roadmap exists, seconds.
    pub t_p: f64,
    pub shape_changes: usize,
    pub replans: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub mode: PlanMode,
    pub waypoints: Vec<Waypoint>,
    pub stats: PlanStats,
}

impl PlanResult {
    /// Consecutive translation steps as `(from, to, source)` head segments.
    pub fn translation_segments(&self) -> Vec<(Vec3, Vec3, ShapeSource)> {
        self.waypoints
            .windows(2)
            .filter(|w| w[1].kind == WaypointKind::Translation)
            .map(|w| (w[0].config.head, w[1].config.head, w[1].source))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    pub mode: PlanMode,
    /// Position roadmap vertex budget.
    pub m_v: usize,
    /// Position roadmap connection radius, meters.
    pub r_t: f64,
    pub seed: u64,
    /// Connection radius of the valid-shape graph; `None` uses the roadmap's
    /// 10th-percentile pairwise cost.
    pub d_c: Option<f64>,
    /// Try polygon rotations before any other shape.
    pub prefer_pn: bool,
    pub sweep: SweepConfig,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            mode: PlanMode::Both,
            m_v: 1500,
            r_t: 3.0,
            seed: 1,
            d_c: None,
            prefer_pn: false,
            sweep: SweepConfig::default(),
        }
    }
}

pub struct PlanRequest<'a> {
    pub map: &'a OccupancyMap,
    pub params: ChainParams,
    pub start: FullConfig,
    pub goal: Vec3,
    pub goal_radius: f64,
    pub config: PlannerConfig,
    pub library: &'a ShapeLibrary,
    pub srs: Option<&'a ShapeRoadmap>,
    /// Use this position roadmap instead of sampling one.
    pub roadmap: Option<TranslationRoadmap>,
}

/// One shape to try on an edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub shape: ShapeConfig,
    /// `None` for the current shape.
    pub source: Option<ShapeSource>,
    pub cost: f64,
}

/// The current shape followed by every library entry in `n_psi` azimuth
/// rotations sorted by transition cost from `current`. With `prefer_pn` the
/// polygon rotations come before everything else.
pub fn lsc_candidates(current: &ShapeConfig, library: &ShapeLibrary, params: &ChainParams, prefer_pn: bool) -> Vec<Candidate> {
    let n_psi = params.n_psi.max(1);
    let mut rotated: Vec<Candidate> = library
        .entries
        .iter()
        .flat_map(|(tag, shape)| {
            (0..n_psi).map(move |k| {
                let s = rotate_azimuth(shape, k as f64 * 2.0 * PI / n_psi as f64);
                Candidate {
                    cost: cost_unchecked(current, &s),
                    shape: s,
                    source: Some(ShapeSource::Library { tag: *tag, rotation: k }),
                }
            })
        })
        .collect();
    // Stable sort keeps library order among equal costs.
    rotated.sort_by(|a, b| a.cost.total_cmp(&b.cost));
    let here = Candidate {
        shape: current.clone(),
        source: None,
        cost: 0.0,
    };
    if prefer_pn {
        let is_pn = |c: &Candidate| matches!(c.source, Some(ShapeSource::Library { tag: ShapeTag::Pn, .. }));
        let (pn, rest): (Vec<_>, Vec<_>) = rotated.into_iter().partition(is_pn);
        pn.into_iter().chain(std::iter::once(here)).chain(rest).collect()
    } else {
        std::iter::once(here).chain(rotated).collect()
    }
}

/// `shape` fits at `xi`, survives the rigid sweep to `xj`, and can be reached
/// from `from_shape` in place at `xi`.
pub fn edge_admissible(
    shape: &ShapeConfig,
    map: &OccupancyMap,
    params: &ChainParams,
    xi: &Vec3,
    xj: &Vec3,
    from_shape: &ShapeConfig,
    sweep: &SweepConfig,
) -> bool {
    chain_collision_free(&FullConfig::new(*xi, shape.clone()), params, map)
        && translation_free(shape, xi, xj, params, map)
        && (from_shape == shape
            || motion_free(
                &FullConfig::new(*xi, from_shape.clone()),
                &FullConfig::new(*xi, shape.clone()),
                params,
                map,
                sweep,
            ))
}

struct Progress {
    waypoints: Vec<Waypoint>,
    shape: ShapeConfig,
    source: ShapeSource,
}

impl Progress {
    fn transition(&mut self, head: Vec3, shape: ShapeConfig, source: ShapeSource) {
        if cost_unchecked(&self.shape, &shape) > 0.0 {
            self.waypoints.push(Waypoint {
                kind: WaypointKind::Transition,
                config: FullConfig::new(head, shape.clone()),
                source,
            });
        }
        self.shape = shape;
        self.source = source;
    }

    fn translate(&mut self, to: Vec3) {
        self.waypoints.push(Waypoint {
            kind: WaypointKind::Translation,
            config: FullConfig::new(to, self.shape.clone()),
            source: self.source,
        });
    }
}

pub fn plan(req: PlanRequest<'_>) -> Result<PlanResult> {
    let PlanRequest {
        map,
        params,
        start,
        goal,
        goal_radius,
        config,
        library,
        srs,
        roadmap,
    } = req;
    params.validate()?;
    if config.mode == PlanMode::FullState {
        return Err(Error::InvalidParameter("use the baseline module for full-state planning".into()));
    }
    if start.shape.n_units() != params.n_units {
        return Err(Error::DimensionMismatch {
            expected: params.shape_dim(),
            found: start.shape.dim(),
        });
    }
    if !chain_collision_free(&start, &params, map) || !self_collision_free(&start.shape, &params) {
        return Err(Error::InvalidStart);
    }
    if config.mode.uses_srs() && srs.is_none() {
        return Err(Error::MissingSrs(config.mode.as_str()));
    }
    if let Some(s) = srs {
        if s.params.n_units != params.n_units {
            return Err(Error::DimensionMismatch {
                expected: params.shape_dim(),
                found: s.params.shape_dim(),
            });
        }
    }
    if !map.sphere_free(&goal, params.unit_radius) {
        return Err(Error::InvalidGoal);
    }
    let d_c = config.d_c.unwrap_or_else(|| srs.map_or(0.0, |s| s.default_connection_radius()));

    let t0 = Instant::now();
    let mut rm = match roadmap {
        Some(rm) => rm,
        None => build_translation_roadmap(map, params.unit_radius, config.m_v, config.r_t, config.seed, &start.head)?,
    };
    let start_v = find_or_insert(&mut rm, map, &start.head);
    let goal_v = find_or_insert(&mut rm, map, &goal);
    let near = srs.filter(|_| config.mode.uses_srs()).map(|s| (s, ShapeNeighbors::new(&s.vertices, d_c)));
    let t_g = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let mut progress = Progress {
        waypoints: vec![Waypoint {
            kind: WaypointKind::Start,
            config: start.clone(),
            source: ShapeSource::Start,
        }],
        shape: start.shape.clone(),
        source: ShapeSource::Start,
    };
    let max_removals = 3 * rm.graph.edge_count();
    let mut removals = 0;
    let mut replans = 0;
    let in_goal = |p: &Vec3| (p - goal).norm() <= goal_radius;

    let mut cur = start_v;
    let mut path = rm.query_path(cur, goal_v);
    let mut step = 0;
    let success = loop {
        if in_goal(&rm.vertices[cur]) {
            break true;
        }
        let Some(p) = path.as_ref() else {
            break false;
        };
        let next = p[step + 1];
        let (xi, xj) = (rm.vertices[cur], rm.vertices[next]);
        if traverse_edge(&mut progress, map, &params, library, near.as_ref(), &config, &xi, &xj) {
            cur = next;
            step += 1;
            continue;
        }
        rm.remove_edge(cur, next);
        removals += 1;
        replans += 1;
        if removals > max_removals {
            log::warn!("edge removal cap of {max_removals} reached");
            break false;
        }
        path = rm.query_path(cur, goal_v);
        step = 0;
    };
    let t_p = t1.elapsed().as_secs_f64();
    let shape_changes = progress
        .waypoints
        .iter()
        .filter(|w| w.kind == WaypointKind::Transition)
        .count();
    Ok(PlanResult {
        mode: config.mode,
        waypoints: progress.waypoints,
        stats: PlanStats {
            t_g,
            t_p,
            shape_changes,
            replans,
            success,
        },
    })
}

fn find_or_insert(rm: &mut TranslationRoadmap, map: &OccupancyMap, p: &Vec3) -> usize {
    match rm.vertices.iter().position(|v| v == p) {
        Some(i) => i,
        None => rm.insert_vertex(map, p, ATTACH_K),
    }
}

/// Finds shapes for one edge and records the motion. Returns false when no
/// shape can traverse it.
#[allow(clippy::too_many_arguments)]
fn traverse_edge(
    progress: &mut Progress,
    map: &OccupancyMap,
    params: &ChainParams,
    library: &ShapeLibrary,
    srs: Option<&(&ShapeRoadmap, ShapeNeighbors)>,
    config: &PlannerConfig,
    xi: &Vec3,
    xj: &Vec3,
) -> bool {
    if config.mode.uses_library() {
        let cands = lsc_candidates(&progress.shape, library, params, config.prefer_pn);
        let current = progress.shape.clone();
        let found = cands
            .par_iter()
            .position_first(|c| edge_admissible(&c.shape, map, params, xi, xj, &current, &config.sweep));
        if let Some(i) = found {
            let c = &cands[i];
            let source = c.source.unwrap_or(progress.source);
            progress.transition(*xi, c.shape.clone(), source);
            progress.translate(*xj);
            return true;
        }
    }
    if let Some((srs, near)) = srs {
        // The current shape is node 0 of the connection search, so an edge it
        // can already traverse comes back with no transitions.
        let res = srs_connect_with(&progress.shape, srs, near, map, params, xi, xj, &config.sweep);
        if res.success {
            for &idx in &res.shape_indices {
                progress.transition(*xi, srs.vertices[idx].clone(), ShapeSource::Srs(idx));
            }
            progress.translate(*xj);
            return true;
        }
    }
    false
}
