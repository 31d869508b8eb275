//! Edge connection through random shapes when no library shape works.
//!
//! At the start of a blocked edge the random shapes that fit there (valid)
//! are linked into a local graph, and the cheapest transition sequence from
//! the current shape to one that can traverse the edge (admissible) is
//! searched. Transitions on the chosen path are checked against the map and
//! failing ones pruned until a clean path is found or none remains.

use std::cell::RefCell;
use std::collections::HashMap;

use rayon::prelude::*;

use crate::geometry::Vec3;
use crate::graph::Graph;
use crate::kinematics::{chain_collision_free, cost_unchecked, ChainParams, FullConfig, ShapeConfig};
use crate::map::OccupancyMap;
use crate::motion::{motion_free, translation_free, SweepConfig};
use crate::srs::ShapeRoadmap;

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionResult {
    /// Shape transitions at `xi`, then the translation to `xj` in the final
    /// shape. Starts with the current configuration.
    pub sigma_min: Vec<FullConfig>,
    /// Roadmap indices of the shapes visited, in order, excluding the current one.
    pub shape_indices: Vec<usize>,
    pub cost: f64,
    pub success: bool,
}

impl ConnectionResult {
    fn failure() -> Self {
        ConnectionResult {
            sigma_min: Vec::new(),
            shape_indices: Vec::new(),
            cost: f64::INFINITY,
            success: false,
        }
    }
}

/// Indices of shapes that are collision-free with the head at `xi`.
pub fn valid_shapes(shapes: &[ShapeConfig], map: &OccupancyMap, params: &ChainParams, xi: &Vec3) -> Vec<usize> {
    (0..shapes.len())
        .into_par_iter()
        .filter(|&i| chain_collision_free(&FullConfig::new(*xi, shapes[i].clone()), params, map))
        .collect()
}

/// Subset of `valid` that stays free when rigidly translated from `xi` to `xj`.
pub fn admissible_shapes(
    valid: &[usize],
    shapes: &[ShapeConfig],
    map: &OccupancyMap,
    params: &ChainParams,
    xi: &Vec3,
    xj: &Vec3,
) -> Vec<usize> {
    valid
        .par_iter()
        .copied()
        .filter(|&i| xi == xj || translation_free(&shapes[i], xi, xj, params, map))
        .collect()
}

/// Pairs of roadmap shapes within a connection radius, computed once per
/// roadmap and radius since they do not depend on the map.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeNeighbors {
    pub d_c: f64,
    lists: Vec<Vec<(usize, f64)>>,
}

impl ShapeNeighbors {
    pub fn new(shapes: &[ShapeConfig], d_c: f64) -> Self {
        let lists = (0..shapes.len())
            .into_par_iter()
            .map(|a| {
                (0..shapes.len())
                    .filter(|&b| b != a)
                    .filter_map(|b| {
                        let w = cost_unchecked(&shapes[a], &shapes[b]);
                        (w <= d_c).then_some((b, w))
                    })
                    .collect()
            })
            .collect();
        ShapeNeighbors { d_c, lists }
    }
}

/// Local graph over the current shape (node 0) and the valid shapes.
struct ValidGraph {
    graph: Graph,
    /// Roadmap index of node `k + 1`.
    members: Vec<usize>,
}

fn build_valid_graph(current: &ShapeConfig, shapes: &[ShapeConfig], valid: &[usize], near: &ShapeNeighbors) -> ValidGraph {
    let n = valid.len() + 1;
    let mut node_of = vec![usize::MAX; shapes.len()];
    for (k, &i) in valid.iter().enumerate() {
        node_of[i] = k + 1;
    }
    let mut graph = Graph::with_vertices(n);
    let to_current: Vec<(usize, f64)> = valid.iter().map(|&i| (node_of[i], cost_unchecked(current, &shapes[i]))).collect();
    for &(b, w) in &to_current {
        if w <= near.d_c {
            graph.add_edge(0, b, w);
        }
    }
    for &i in valid {
        for &(j, w) in &near.lists[i] {
            let (a, b) = (node_of[i], node_of[j]);
            if b != usize::MAX && a < b {
                graph.add_edge(a, b, w);
            }
        }
    }
    if n > 1 && graph.neighbors(0).is_empty() {
        // Without any neighbour the search could never leave the current shape.
        let (b, w) = to_current
            .into_iter()
            .min_by(|x, y| x.1.total_cmp(&y.1))
            .expect("at least one valid shape");
        graph.add_edge(0, b, w);
    }
    ValidGraph {
        graph,
        members: valid.to_vec(),
    }
}

/// Cheapest map-checked transition sequence from `current` at `xi` to a shape
/// that can traverse `xi`-`xj`. The caller guarantees `current` is free at `xi`.
#[allow(clippy::too_many_arguments)]
pub fn srs_connect(
    current: &ShapeConfig,
    srs: &ShapeRoadmap,
    map: &OccupancyMap,
    params: &ChainParams,
    xi: &Vec3,
    xj: &Vec3,
    d_c: f64,
    sweep: &SweepConfig,
) -> ConnectionResult {
    srs_connect_with(current, srs, &ShapeNeighbors::new(&srs.vertices, d_c), map, params, xi, xj, sweep)
}

/// [`srs_connect`] with the shape pairs precomputed.
#[allow(clippy::too_many_arguments)]
pub fn srs_connect_with(
    current: &ShapeConfig,
    srs: &ShapeRoadmap,
    near: &ShapeNeighbors,
    map: &OccupancyMap,
    params: &ChainParams,
    xi: &Vec3,
    xj: &Vec3,
    sweep: &SweepConfig,
) -> ConnectionResult {
    let shapes = &srs.vertices;
    let valid = valid_shapes(shapes, map, params, xi);
    let ValidGraph { mut graph, members } = build_valid_graph(current, shapes, &valid, near);
    let node_shape = |k: usize| if k == 0 { current } else { &shapes[members[k - 1]] };
    // Admissibility is tested when the search first settles a node, so only
    // shapes closer than the nearest admissible one are ever swept.
    let admissible: RefCell<Vec<Option<bool>>> = RefCell::new(vec![None; members.len() + 1]);
    let is_target = |k: usize| {
        *admissible.borrow_mut()[k]
            .get_or_insert_with(|| xi == xj || translation_free(node_shape(k), xi, xj, params, map))
    };
    let mut checked: HashMap<(usize, usize), bool> = HashMap::new();

    loop {
        let Some((path, cost)) = graph.shortest_path_to(0, is_target) else {
            return ConnectionResult::failure();
        };
        let mut blocked = None;
        for w in path.windows(2) {
            let key = (w[0].min(w[1]), w[0].max(w[1]));
            let ok = *checked.entry(key).or_insert_with(|| {
                let a = FullConfig::new(*xi, node_shape(w[0]).clone());
                let b = FullConfig::new(*xi, node_shape(w[1]).clone());
                motion_free(&a, &b, params, map, sweep)
            });
            if !ok {
                blocked = Some((w[0], w[1]));
                break;
            }
        }
        match blocked {
            Some((a, b)) => {
                graph.remove_edge(a, b);
            }
            None => {
                let mut sigma_min: Vec<FullConfig> =
                    path.iter().map(|&k| FullConfig::new(*xi, node_shape(k).clone())).collect();
                let last = sigma_min.last().expect("path is non-empty").shape.clone();
                if xi != xj {
                    sigma_min.push(FullConfig::new(*xj, last));
                }
                return ConnectionResult {
                    sigma_min,
                    shape_indices: path[1..].iter().map(|&k| members[k - 1]).collect(),
                    cost,
                    success: true,
                };
            }
        }
    }
}
