//! Undirected weighted graphs, shortest paths and a uniform-grid point index.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use crate::geometry::Vec3;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Min-heap on cost, ties broken by lower node index.
    fn cmp(&self, other: &Self) -> Ordering {
        other.cost.total_cmp(&self.cost).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Graph {
    pub fn with_vertices(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Adds `u`-`v` unless it already exists. Self loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize, w: f64) -> bool {
        if u == v || self.has_edge(u, v) {
            return false;
        }
        self.adj[u].push((v, w));
        self.adj[v].push((u, w));
        true
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].iter().any(|&(x, _)| x == v)
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<f64> {
        self.adj[u].iter().find(|&&(x, _)| x == v).map(|&(_, w)| w)
    }

    /// Returns whether the edge was present.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let before = self.adj[u].len();
        self.adj[u].retain(|&(x, _)| x != v);
        self.adj[v].retain(|&(x, _)| x != u);
        before != self.adj[u].len()
    }

    pub fn neighbors(&self, u: usize) -> &[(usize, f64)] {
        &self.adj[u]
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out: Vec<_> = self
            .adj
            .iter()
            .enumerate()
            .flat_map(|(u, nb)| nb.iter().filter(move |&&(v, _)| u < v).map(move |&(v, w)| (u, v, w)))
            .collect();
        out.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        out
    }

    /// Shortest path from `source` to the cheapest reachable vertex for which
    /// `is_target` holds. Returns the vertex sequence and its cost.
    pub fn shortest_path_to(&self, source: usize, is_target: impl Fn(usize) -> bool) -> Option<(Vec<usize>, f64)> {
        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        dist[source] = 0.0;
        heap.push(Entry { cost: 0.0, node: source });
        while let Some(Entry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            if is_target(node) {
                let mut path = vec![node];
                let mut cur = node;
                while prev[cur] != usize::MAX {
                    cur = prev[cur];
                    path.push(cur);
                }
                path.reverse();
                return Some((path, cost));
            }
            for &(v, w) in &self.adj[node] {
                let c = cost + w;
                if c < dist[v] {
                    dist[v] = c;
                    prev[v] = node;
                    heap.push(Entry { cost: c, node: v });
                }
            }
        }
        None
    }

    pub fn shortest_path(&self, source: usize, target: usize) -> Option<(Vec<usize>, f64)> {
        self.shortest_path_to(source, |v| v == target)
    }

    /// Component label per vertex, labels numbered from 0 in order of first vertex.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.adj.len()];
        let mut next = 0;
        for s in 0..self.adj.len() {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = next;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }

    pub fn largest_component_size(&self) -> usize {
        let mut counts = HashMap::new();
        for c in self.components() {
            *counts.entry(c).or_insert(0usize) += 1;
        }
        counts.values().copied().max().unwrap_or(0)
    }
}

/// Uniform grid over points for radius and nearest-neighbour queries.
#[derive(Debug, Clone)]
pub struct PointIndex {
    cell: f64,
    buckets: HashMap<[i64; 3], Vec<usize>>,
    points: Vec<Vec3>,
}

impl PointIndex {
    pub fn new(cell: f64) -> Self {
        assert!(cell > 0.0, "cell size must be positive");
        PointIndex {
            cell,
            buckets: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn key(&self, p: &Vec3) -> [i64; 3] {
        [
            (p.x / self.cell).floor() as i64,
            (p.y / self.cell).floor() as i64,
            (p.z / self.cell).floor() as i64,
        ]
    }

    pub fn insert(&mut self, p: Vec3) -> usize {
        let id = self.points.len();
        self.buckets.entry(self.key(&p)).or_default().push(id);
        self.points.push(p);
        id
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ids within `r` of `p`, sorted by id.
    pub fn within(&self, p: &Vec3, r: f64) -> Vec<usize> {
        let lo = self.key(&(p - Vec3::repeat(r)));
        let hi = self.key(&(p + Vec3::repeat(r)));
        let mut out = Vec::new();
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    if let Some(ids) = self.buckets.get(&[i, j, k]) {
                        out.extend(ids.iter().copied().filter(|&id| (self.points[id] - p).norm() <= r));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Up to `k` nearest ids in increasing distance (ties by id), searching
    /// rings of cells outward until the answer is settled.
    pub fn nearest(&self, p: &Vec3, k: usize) -> Vec<usize> {
        if self.points.is_empty() || k == 0 {
            return Vec::new();
        }
        let mut r = self.cell;
        loop {
            let mut found = self.within(p, r);
            if found.len() >= k || found.len() == self.points.len() {
                found.sort_by(|&a, &b| {
                    (self.points[a] - p)
                        .norm()
                        .total_cmp(&(self.points[b] - p).norm())
                        .then(a.cmp(&b))
                });
                found.truncate(k);
                return found;
            }
            r *= 2.0;
        }
    }
}
