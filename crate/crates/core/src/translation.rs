//! Probabilistic roadmap over head positions.
//!
//! Vertices and edges are validated for the head unit's clearance sphere only;
//! whether the whole chain can follow an edge is decided per edge at planning
//! time.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::graph::{Graph, PointIndex};
use crate::map::OccupancyMap;

/// Number of roadmap vertices a new query point is linked to.
pub const ATTACH_K: usize = 10;
/// Nearest vertices examined when looking for `ATTACH_K` visible ones.
const ATTACH_CANDIDATES: usize = 60;
/// Sampling attempts allowed per requested vertex.
const REJECTIONS_PER_VERTEX: usize = 200;

#[derive(Debug, Clone)]
pub struct TranslationRoadmap {
    pub vertices: Vec<Vec3>,
    pub graph: Graph,
    pub r_t: f64,
    pub m_v: usize,
    pub seed: u64,
    pub radius: f64,
    index: PointIndex,
}

/// Samples `m_v - 1` free head positions plus `start` (vertex 0) and links
/// every pair closer than `r_t` whose segment is free for a sphere of `radius`.
pub fn build_translation_roadmap(
    map: &OccupancyMap,
    radius: f64,
    m_v: usize,
    r_t: f64,
    seed: u64,
    start: &Vec3,
) -> Result<TranslationRoadmap> {
    if m_v == 0 || !(r_t > 0.0) {
        return Err(Error::InvalidParameter("roadmap needs m_v >= 1 and r_t > 0".into()));
    }
    if !map.sphere_free(start, radius) {
        return Err(Error::InvalidStart);
    }
    let (lo, hi) = map.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = Vec::with_capacity(m_v);
    vertices.push(*start);
    let budget = REJECTIONS_PER_VERTEX * m_v;
    let mut tries = 0;
    while vertices.len() < m_v {
        if tries == budget {
            return Err(Error::SamplingBudget(budget));
        }
        tries += 1;
        let p = Vec3::new(
            rng.gen_range(lo.x..hi.x),
            rng.gen_range(lo.y..hi.y),
            rng.gen_range(lo.z..hi.z),
        );
        if map.sphere_free(&p, radius) {
            vertices.push(p);
        }
    }
    let mut rm = TranslationRoadmap::from_vertices(map, radius, vertices, r_t);
    rm.m_v = m_v;
    rm.seed = seed;
    Ok(rm)
}

impl TranslationRoadmap {
    /// Roadmap over given positions, with edges validated as in a built one.
    /// Positions are trusted to be free.
    pub fn from_vertices(map: &OccupancyMap, radius: f64, vertices: Vec<Vec3>, r_t: f64) -> Self {
        let mut index = PointIndex::new(r_t);
        for v in &vertices {
            index.insert(*v);
        }
        let per_vertex: Vec<Vec<(usize, f64)>> = (0..vertices.len())
            .into_par_iter()
            .map(|i| {
                index
                    .within(&vertices[i], r_t)
                    .into_iter()
                    .filter(|&j| j > i && map.segment_free(&vertices[i], &vertices[j], radius))
                    .map(|j| (j, (vertices[j] - vertices[i]).norm()))
                    .collect()
            })
            .collect();
        let mut graph = Graph::with_vertices(vertices.len());
        for (i, nb) in per_vertex.into_iter().enumerate() {
            for (j, w) in nb {
                graph.add_edge(i, j, w);
            }
        }
        TranslationRoadmap {
            m_v: vertices.len(),
            vertices,
            graph,
            r_t,
            seed: 0,
            radius,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Adds `p` as a vertex linked to its `k` nearest visible vertices.
    /// Returns the new vertex id; the caller guarantees `p` is free.
    pub fn insert_vertex(&mut self, map: &OccupancyMap, p: &Vec3, k: usize) -> usize {
        let near = self.index.nearest(p, ATTACH_CANDIDATES);
        let id = self.graph.add_vertex();
        self.vertices.push(*p);
        self.index.insert(*p);
        let mut linked = 0;
        for j in near {
            if linked == k {
                break;
            }
            if map.segment_free(p, &self.vertices[j], self.radius) {
                self.graph.add_edge(id, j, (self.vertices[j] - p).norm());
                linked += 1;
            }
        }
        id
    }

    /// Shortest vertex path between two roadmap vertices.
    pub fn query_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        self.graph.shortest_path(from, to).map(|(p, _)| p)
    }

    /// Attaches `from` and `to` (when they are not already vertices) and
    /// returns the shortest path as positions.
    pub fn query(&mut self, map: &OccupancyMap, from: &Vec3, to: &Vec3) -> Option<Vec<Vec3>> {
        if from == to {
            return Some(vec![*from]);
        }
        let a = self.vertex_at(from).unwrap_or_else(|| self.insert_vertex(map, from, ATTACH_K));
        let b = self.vertex_at(to).unwrap_or_else(|| self.insert_vertex(map, to, ATTACH_K));
        self.query_path(a, b)
            .map(|p| p.into_iter().map(|i| self.vertices[i]).collect())
    }

    fn vertex_at(&self, p: &Vec3) -> Option<usize> {
        self.index.within(p, 0.0).first().copied()
    }

    /// Removes edge `v`-`u`; a missing edge is logged and ignored.
    pub fn remove_edge(&mut self, v: usize, u: usize) -> bool {
        let removed = v < self.len() && u < self.len() && self.graph.remove_edge(v, u);
        if !removed {
            log::warn!("remove_edge: no edge between {v} and {u}");
        }
        removed
    }

    pub fn path_length(&self, path: &[usize]) -> f64 {
        path.windows(2).map(|w| (self.vertices[w[1]] - self.vertices[w[0]]).norm()).sum()
    }

    /// Text dump with `vertices` and `edges` sections.
    pub fn dump(&self) -> String {
        let mut out = String::from("ARCROADMAP v1\n");
        let _ = writeln!(out, "params {} {:?} {} {:?}", self.m_v, self.r_t, self.seed, self.radius);
        let _ = writeln!(out, "vertices {}", self.vertices.len());
        for v in &self.vertices {
            let _ = writeln!(out, "{:?} {:?} {:?}", v.x, v.y, v.z);
        }
        let edges = self.graph.edges();
        let _ = writeln!(out, "edges {}", edges.len());
        for (i, j, w) in edges {
            let _ = writeln!(out, "{i} {j} {w:?}");
        }
        out
    }
}
