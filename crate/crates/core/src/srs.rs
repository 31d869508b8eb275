//! Roadmap of random self-collision-free shapes, built offline without a map.
//!
//! File format `ARCSRS v1`:
//!
//! ```text
//! ARCSRS v1
//! # free-form comment lines
//! params <n_units> <link_length> <unit_radius> <link_radius> <joint_limit> <n_psi>
//! seed <u64>
//! r_s <radius>
//! steps <sweep steps>
//! library <count>
//! <tag> <2N-1 angles>
//! vertices <count>
//! <2N-1 angles>
//! edges <count>
//! <i> <j> <weight>
//! checksum <sha256 of every preceding byte, hex>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::wrap_angle;
use crate::graph::Graph;
use crate::kinematics::{
    cost_unchecked, self_collision_free, transition_self_collision_free, ChainParams, LinkAngles, ShapeConfig,
};
use crate::lsc::{ShapeLibrary, ShapeTag};

pub const SRS_HEADER: &str = "ARCSRS v1";
/// Interpolation points used to self-collision check each roadmap edge.
pub const SRS_SWEEP_STEPS: usize = 32;
/// Rejection attempts allowed per sampled shape.
pub const SAMPLE_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeRoadmap {
    pub params: ChainParams,
    pub vertices: Vec<ShapeConfig>,
    pub graph: Graph,
    pub r_s: f64,
    pub seed: u64,
    pub steps: usize,
    /// Engineered shapes used alongside this roadmap, stored so a run's full
    /// shape set can be reproduced from the file.
    pub library: Vec<(ShapeTag, ShapeConfig)>,
}

/// Head yaw uniform on the circle, relative pitch and yaw of each link
/// uniform in `[-joint_limit, joint_limit]`, accumulated along the chain.
/// Resamples until the shape is self-collision-free.
pub fn sample_free_shape(params: &ChainParams, rng: &mut impl Rng) -> Result<ShapeConfig> {
    let lim = params.joint_limit;
    let rel = |rng: &mut dyn rand::RngCore| if lim > 0.0 { rng.gen_range(-lim..=lim) } else { 0.0 };
    for _ in 0..SAMPLE_BUDGET {
        let head_yaw = wrap_angle(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let mut pitch = 0.0;
        let mut yaw = head_yaw;
        let mut links = Vec::with_capacity(params.n_links());
        for _ in 0..params.n_links() {
            pitch = wrap_angle(pitch + rel(rng));
            yaw = wrap_angle(yaw + rel(rng));
            links.push(LinkAngles { pitch, yaw });
        }
        let shape = ShapeConfig { head_yaw, links };
        if self_collision_free(&shape, params) {
            return Ok(shape);
        }
    }
    Err(Error::SamplingBudget(SAMPLE_BUDGET))
}

/// Builds the roadmap: the straight shape as vertex 0, `n_srs - 1` random
/// shapes, and edges between shapes within `r_s` whose straight interpolation
/// stays self-collision-free.
pub fn build_srs(params: &ChainParams, n_srs: usize, r_s: f64, seed: u64) -> Result<ShapeRoadmap> {
    params.validate()?;
    if n_srs == 0 {
        return Err(Error::InvalidParameter("n_srs must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vertices = vec![ShapeConfig::straight(params.n_units)];
    while vertices.len() < n_srs {
        vertices.push(sample_free_shape(params, &mut rng)?);
    }
    let library = crate::lsc::build_library(params).entries;
    Ok(ShapeRoadmap::from_vertices(params, vertices, r_s, seed, library))
}

impl ShapeRoadmap {
    /// Connects the given shapes as `build_srs` would.
    pub fn from_vertices(
        params: &ChainParams,
        vertices: Vec<ShapeConfig>,
        r_s: f64,
        seed: u64,
        library: Vec<(ShapeTag, ShapeConfig)>,
    ) -> Self {
        let steps = SRS_SWEEP_STEPS;
        let per_vertex: Vec<Vec<(usize, f64)>> = (0..vertices.len())
            .into_par_iter()
            .map(|i| {
                (i + 1..vertices.len())
                    .filter_map(|j| {
                        let w = cost_unchecked(&vertices[i], &vertices[j]);
                        (w <= r_s && transition_self_collision_free(&vertices[i], &vertices[j], params, steps))
                            .then_some((j, w))
                    })
                    .collect()
            })
            .collect();
        let mut graph = Graph::with_vertices(vertices.len());
        for (i, nb) in per_vertex.into_iter().enumerate() {
            for (j, w) in nb {
                graph.add_edge(i, j, w);
            }
        }
        ShapeRoadmap {
            params: params.clone(),
            vertices,
            graph,
            r_s,
            seed,
            steps,
            library,
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Library stored with the roadmap.
    pub fn shape_library(&self) -> ShapeLibrary {
        ShapeLibrary {
            entries: self.library.clone(),
            params: self.params.clone(),
        }
    }

    /// 10th percentile of all pairwise transition costs.
    pub fn default_connection_radius(&self) -> f64 {
        let n = self.vertices.len();
        if n < 2 {
            return 0.0;
        }
        let mut d: Vec<f64> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| cost_unchecked(&self.vertices[i], &self.vertices[j]))
            .collect();
        let k = (d.len() - 1) / 10;
        *d.select_nth_unstable_by(k, f64::total_cmp).1
    }
}

fn write_angles(out: &mut String, s: &ShapeConfig) {
    let v = s.to_vec();
    let parts: Vec<String> = v.iter().map(|a| format!("{a:.16e}")).collect();
    out.push_str(&parts.join(" "));
}

pub fn srs_to_string(srs: &ShapeRoadmap, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(SRS_HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let p = &srs.params;
    let _ = writeln!(
        out,
        "params {} {:?} {:?} {:?} {:?} {}",
        p.n_units, p.link_length, p.unit_radius, p.link_radius, p.joint_limit, p.n_psi
    );
    let _ = writeln!(out, "seed {}", srs.seed);
    let _ = writeln!(out, "r_s {:?}", srs.r_s);
    let _ = writeln!(out, "steps {}", srs.steps);
    let _ = writeln!(out, "library {}", srs.library.len());
    for (tag, s) in &srs.library {
        let _ = write!(out, "{tag} ");
        write_angles(&mut out, s);
        out.push('\n');
    }
    let _ = writeln!(out, "vertices {}", srs.vertices.len());
    for s in &srs.vertices {
        write_angles(&mut out, s);
        out.push('\n');
    }
    let edges = srs.graph.edges();
    let _ = writeln!(out, "edges {}", edges.len());
    for (i, j, w) in edges {
        let _ = writeln!(out, "{i} {j} {w:.16e}");
    }
    let digest = hex(&Sha256::digest(out.as_bytes()));
    let _ = writeln!(out, "checksum {digest}");
    out
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn save_srs(srs: &ShapeRoadmap, path: &Path, comments: &[String]) -> Result<()> {
    std::fs::write(path, srs_to_string(srs, comments)).map_err(|e| Error::io(path, e))
}

/// Loads a roadmap and checks it was built for a chain of `expected_units`.
pub fn load_srs(path: &Path, expected_units: usize) -> Result<ShapeRoadmap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let srs = srs_from_str(&text)?;
    if srs.params.n_units != expected_units {
        return Err(Error::DimensionMismatch {
            expected: 2 * expected_units - 1,
            found: 2 * srs.params.n_units - 1,
        });
    }
    Ok(srs)
}

struct Lines<'a> {
    iter: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        for (i, l) in self.iter.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() && !l.starts_with('#') {
                return Ok((i + 1, l));
            }
        }
        Err(Error::parse(self.last + 1, format!("unexpected end of file, expected {what}")))
    }

    fn keyed(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        let (n, line) = self.next(key)?;
        let mut it = line.split_whitespace();
        if it.next() != Some(key) {
            return Err(Error::parse(n, format!("expected `{key}`")));
        }
        Ok((n, it.collect()))
    }
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(line, format!("bad number `{s}`")))
}

fn one<T: std::str::FromStr>(line: usize, v: &[&str]) -> Result<T> {
    match v {
        [s] => num(line, s),
        _ => Err(Error::parse(line, "expected one value")),
    }
}

fn angles(line: usize, toks: &[&str], dim: usize) -> Result<ShapeConfig> {
    if toks.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: toks.len(),
        });
    }
    let v: Vec<f64> = toks.iter().map(|t| num(line, t)).collect::<Result<_>>()?;
    ShapeConfig::from_slice(&v)
}

pub fn srs_from_str(text: &str) -> Result<ShapeRoadmap> {
    // Verify the checksum over the raw bytes before the checksum line.
    let pos = text
        .rfind("checksum ")
        .filter(|&p| p == 0 || text.as_bytes()[p - 1] == b'\n')
        .ok_or_else(|| Error::parse(text.lines().count(), "missing checksum line"))?;
    let checksum_line_no = text[..pos].lines().count() + 1;
    let stated = text[pos + "checksum ".len()..].trim();
    if stated.len() != 64 || !stated.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(Error::parse(checksum_line_no, "malformed checksum"));
    }
    let body = &text[..pos];

    let mut lines = Lines {
        iter: body.lines().enumerate().peekable(),
        last: 0,
    };
    let (n, header) = lines.next("header")?;
    if header != SRS_HEADER {
        if header.starts_with("ARCSRS") {
            return Err(Error::Version(header.to_string()));
        }
        return Err(Error::parse(n, format!("expected `{SRS_HEADER}`")));
    }
    if hex(&Sha256::digest(body.as_bytes())) != stated {
        return Err(Error::Checksum);
    }

    let (n, p) = lines.keyed("params")?;
    if p.len() != 6 {
        return Err(Error::parse(n, "`params` takes 6 values"));
    }
    let params = ChainParams {
        n_units: num(n, p[0])?,
        link_length: num(n, p[1])?,
        unit_radius: num(n, p[2])?,
        link_radius: num(n, p[3])?,
        joint_limit: num(n, p[4])?,
        n_psi: num(n, p[5])?,
    };
    params.validate().map_err(|e| Error::parse(n, e.to_string()))?;
    let dim = params.shape_dim();
    let (n, v) = lines.keyed("seed")?;
    let seed: u64 = one(n, &v)?;
    let (n, v) = lines.keyed("r_s")?;
    let r_s: f64 = one(n, &v)?;
    let (n, v) = lines.keyed("steps")?;
    let steps: usize = one(n, &v)?;

    let (n, v) = lines.keyed("library")?;
    let count: usize = one(n, &v)?;
    let mut library = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, line) = lines.next("library entry")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        let tag: ShapeTag = toks[0].parse().map_err(|_| Error::parse(n, "bad shape tag"))?;
        library.push((tag, angles(n, &toks[1..], dim)?));
    }

    let (n, v) = lines.keyed("vertices")?;
    let count: usize = one(n, &v)?;
    let mut vertices = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, line) = lines.next("vertex")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        vertices.push(angles(n, &toks, dim)?);
    }

    let (n, v) = lines.keyed("edges")?;
    let count: usize = one(n, &v)?;
    let mut graph = Graph::with_vertices(vertices.len());
    for _ in 0..count {
        let (n, line) = lines.next("edge")?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(Error::parse(n, "edge takes `i j weight`"));
        }
        let (i, j): (usize, usize) = (num(n, toks[0])?, num(n, toks[1])?);
        if i >= vertices.len() || j >= vertices.len() {
            return Err(Error::parse(n, "edge endpoint out of range"));
        }
        graph.add_edge(i, j, num(n, toks[2])?);
    }
    if let Ok((n, _)) = lines.next("nothing") {
        return Err(Error::parse(n, "unexpected content before checksum"));
    }
    Ok(ShapeRoadmap {
        params,
        vertices,
        graph,
        r_s,
        seed,
        steps,
        library,
    })
}
