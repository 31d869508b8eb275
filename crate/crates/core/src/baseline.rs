//! Full-state roadmap over head position and shape together, searched with
//! lazy edge validation. Used only as a point of comparison.

use std::collections::HashMap;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::graph::{Graph, PointIndex};
use crate::kinematics::{chain_collision_free, cost_unchecked, self_collision_free, ChainParams, FullConfig};
use crate::map::OccupancyMap;
use crate::motion::{motion_free, SweepConfig};
use crate::planner::{PlanMode, PlanResult, PlanStats, ShapeSource, Waypoint, WaypointKind};
use crate::srs::sample_free_shape;

/// Sampling attempts allowed per requested vertex.
const REJECTIONS_PER_VERTEX: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct FullStateConfig {
    /// Vertex budget.
    pub m_f: usize,
    /// Connection radius in the combined distance `d_pos + lambda * C_T`.
    pub radius: f64,
    pub lambda: f64,
    /// Cap on candidate edges per vertex, nearest first.
    pub max_neighbors: usize,
    /// Extra vertices sampled with the head at the goal center.
    pub goal_samples: usize,
    pub seed: u64,
    pub sweep: SweepConfig,
}

impl Default for FullStateConfig {
    fn default() -> Self {
        FullStateConfig {
            m_f: 1500,
            radius: 3.0,
            lambda: 1.0,
            max_neighbors: 20,
            goal_samples: 10,
            seed: 1,
            sweep: SweepConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct FullStateRoadmap {
    pub vertices: Vec<FullConfig>,
    /// Candidate edges; invalid ones are dropped as they are discovered.
    pub graph: Graph,
    /// Validation verdicts keyed by `(min, max)` vertex pair.
    pub validated: HashMap<(usize, usize), bool>,
    pub config: FullStateConfig,
    /// Seconds spent building.
    pub build_time: f64,
    index: PointIndex,
}

fn combined(a: &FullConfig, b: &FullConfig, lambda: f64) -> f64 {
    (a.head - b.head).norm() + lambda * cost_unchecked(&a.shape, &b.shape)
}

/// Samples `m_f` valid full configurations and links candidate neighbours.
/// No edge is collision-checked here.
pub fn build_fullstate(map: &OccupancyMap, params: &ChainParams, config: &FullStateConfig) -> Result<FullStateRoadmap> {
    params.validate()?;
    if config.m_f == 0 || !(config.radius > 0.0) || !(config.lambda >= 0.0) {
        return Err(Error::InvalidParameter("full-state roadmap needs m_f >= 1, radius > 0, lambda >= 0".into()));
    }
    let t0 = Instant::now();
    let (lo, hi) = map.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let budget = REJECTIONS_PER_VERTEX * config.m_f;
    let mut vertices = Vec::with_capacity(config.m_f);
    let mut tries = 0;
    while vertices.len() < config.m_f {
        if tries == budget {
            return Err(Error::SamplingBudget(budget));
        }
        tries += 1;
        let head = Vec3::new(rng.gen_range(lo.x..hi.x), rng.gen_range(lo.y..hi.y), rng.gen_range(lo.z..hi.z));
        if !map.sphere_free(&head, params.unit_radius) {
            continue;
        }
        let cfg = FullConfig::new(head, sample_free_shape(params, &mut rng)?);
        if chain_collision_free(&cfg, params, map) {
            vertices.push(cfg);
        }
    }
    let mut index = PointIndex::new(config.radius.max(map.resolution()));
    for v in &vertices {
        index.insert(v.head);
    }
    let neighbours: Vec<Vec<(usize, f64)>> = (0..vertices.len())
        .into_par_iter()
        .map(|i| near(&vertices, &index, &vertices[i], config, Some(i)))
        .collect();
    let mut graph = Graph::with_vertices(vertices.len());
    for (i, nb) in neighbours.into_iter().enumerate() {
        for (j, w) in nb {
            graph.add_edge(i, j, w);
        }
    }
    Ok(FullStateRoadmap {
        vertices,
        graph,
        validated: HashMap::new(),
        config: config.clone(),
        build_time: t0.elapsed().as_secs_f64(),
        index,
    })
}

/// Up to `max_neighbors` vertices within the combined radius of `q`, nearest first.
fn near(
    vertices: &[FullConfig],
    index: &PointIndex,
    q: &FullConfig,
    config: &FullStateConfig,
    skip: Option<usize>,
) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = index
        .within(&q.head, config.radius)
        .into_iter()
        .filter(|&j| Some(j) != skip)
        .map(|j| (j, combined(q, &vertices[j], config.lambda)))
        .filter(|&(_, d)| d <= config.radius)
        .collect();
    out.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    out.truncate(config.max_neighbors);
    out
}

impl FullStateRoadmap {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Adds a configuration linked to its candidate neighbours.
    pub fn insert(&mut self, cfg: FullConfig) -> usize {
        let nb = near(&self.vertices, &self.index, &cfg, &self.config, None);
        let id = self.graph.add_vertex();
        self.index.insert(cfg.head);
        self.vertices.push(cfg);
        for (j, w) in nb {
            self.graph.add_edge(id, j, w);
        }
        id
    }
}

/// Lazy shortest-path query from `start` to any vertex whose head lies within
/// `goal_radius` of `goal`. Candidate edges on the current best path are
/// validated (head and shape interpolated together); invalid ones are removed
/// and the search repeats. Start and goal vertices are added to `roadmap`.
pub fn query_fullstate(
    roadmap: &mut FullStateRoadmap,
    map: &OccupancyMap,
    params: &ChainParams,
    start: &FullConfig,
    goal: &Vec3,
    goal_radius: f64,
) -> Result<PlanResult> {
    if start.shape.n_units() != params.n_units {
        return Err(Error::DimensionMismatch {
            expected: params.shape_dim(),
            found: start.shape.dim(),
        });
    }
    if !chain_collision_free(start, params, map) || !self_collision_free(&start.shape, params) {
        return Err(Error::InvalidStart);
    }
    let t0 = Instant::now();
    let mut waypoints = vec![Waypoint {
        kind: WaypointKind::Start,
        config: start.clone(),
        source: ShapeSource::Start,
    }];
    let t_g = roadmap.build_time;
    let stats = |success, t_p, waypoints: &[Waypoint]| PlanStats {
        t_g,
        t_p,
        shape_changes: waypoints.windows(2).filter(|w| w[0].config.shape != w[1].config.shape).count(),
        replans: 0,
        success,
    };
    if (start.head - goal).norm() <= goal_radius {
        let s = stats(true, t0.elapsed().as_secs_f64(), &waypoints);
        return Ok(PlanResult {
            mode: PlanMode::FullState,
            waypoints,
            stats: s,
        });
    }
    // Goal configurations: the goal center with sampled shapes that fit there.
    let mut rng = ChaCha8Rng::seed_from_u64(roadmap.config.seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut added = 0;
    let mut tries = 0;
    while added < roadmap.config.goal_samples && tries < REJECTIONS_PER_VERTEX {
        tries += 1;
        let cfg = FullConfig::new(*goal, sample_free_shape(params, &mut rng)?);
        if chain_collision_free(&cfg, params, map) {
            roadmap.insert(cfg);
            added += 1;
        }
    }
    let s = roadmap.insert(start.clone());
    let mut invalidated = 0;
    let path = loop {
        let verts = &roadmap.vertices;
        let Some((path, _)) = roadmap
            .graph
            .shortest_path_to(s, |v| (verts[v].head - goal).norm() <= goal_radius)
        else {
            break None;
        };
        let unknown: Vec<(usize, usize)> = path
            .windows(2)
            .map(|w| (w[0].min(w[1]), w[0].max(w[1])))
            .filter(|k| !roadmap.validated.contains_key(k))
            .collect();
        let verdicts: Vec<bool> = unknown
            .par_iter()
            .map(|&(a, b)| motion_free(&verts[a], &verts[b], params, map, &roadmap.config.sweep))
            .collect();
        let mut clean = true;
        for (k, ok) in unknown.into_iter().zip(verdicts) {
            roadmap.validated.insert(k, ok);
            if !ok {
                roadmap.graph.remove_edge(k.0, k.1);
                invalidated += 1;
                clean = false;
            }
        }
        if clean {
            break Some(path);
        }
    };
    log::debug!("full-state query removed {invalidated} edges");
    let success = path.is_some();
    for v in path.into_iter().flatten().skip(1) {
        waypoints.push(Waypoint {
            kind: WaypointKind::Combined,
            config: roadmap.vertices[v].clone(),
            source: ShapeSource::Sampled,
        });
    }
    let st = stats(success, t0.elapsed().as_secs_f64(), &waypoints);
    Ok(PlanResult {
        mode: PlanMode::FullState,
        waypoints,
        stats: st,
    })
}
