//! Deterministic generators for the evaluation environments.

use serde::{Deserialize, Serialize};

use super::OccupancyMap;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvKind {
    /// Two rooms split by a wall pierced by one rectangular window.
    RoomWindow,
    /// Parallel baffles with openings on alternating sides.
    Maze,
    /// Two vertical cylinders separated by a narrow passage.
    TwoSilo,
    Empty,
}

impl std::str::FromStr for EnvKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "room_window" => Ok(EnvKind::RoomWindow),
            "maze" => Ok(EnvKind::Maze),
            "two_silo" => Ok(EnvKind::TwoSilo),
            "empty" => Ok(EnvKind::Empty),
            other => Err(Error::InvalidParameter(format!("unknown environment `{other}`"))),
        }
    }
}

impl std::fmt::Display for EnvKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EnvKind::RoomWindow => "room_window",
            EnvKind::Maze => "maze",
            EnvKind::TwoSilo => "two_silo",
            EnvKind::Empty => "empty",
        })
    }
}

/// Generator parameters. Lengths are in meters and rounded to whole voxels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvParams {
    pub size: [f64; 3],
    pub resolution: f64,
    pub wall_thickness: f64,
    /// x position of the dividing wall; defaults to the middle of the room.
    pub wall_x: Option<f64>,
    /// Window width (y) and height (z).
    pub window: [f64; 2],
    /// Window center (y, z); defaults to the middle of the wall.
    pub window_center: Option<[f64; 2]>,
    pub baffles: usize,
    /// Width of the gap left at the end of each baffle.
    pub opening: f64,
    pub silo_radius: f64,
    /// Free distance between the two silo surfaces.
    pub silo_gap: f64,
}

impl Default for EnvParams {
    fn default() -> Self {
        EnvParams {
            size: [20.0, 10.0, 3.0],
            resolution: 0.2,
            wall_thickness: 0.2,
            wall_x: None,
            window: [1.0, 1.0],
            window_center: None,
            baffles: 3,
            opening: 1.6,
            silo_radius: 3.0,
            silo_gap: 1.2,
        }
    }
}

fn voxels(len: f64, r_v: f64) -> usize {
    (len / r_v).round().max(0.0) as usize
}

pub fn generate_environment(kind: EnvKind, params: &EnvParams) -> Result<OccupancyMap> {
    let r_v = params.resolution;
    let dims = [
        voxels(params.size[0], r_v),
        voxels(params.size[1], r_v),
        voxels(params.size[2], r_v),
    ];
    let mut map = OccupancyMap::new(Vec3::zeros(), dims, r_v)?;
    match kind {
        EnvKind::Empty => {}
        EnvKind::RoomWindow => room_window(&mut map, params)?,
        EnvKind::Maze => maze(&mut map, params)?,
        EnvKind::TwoSilo => two_silo(&mut map, params)?,
    }
    Ok(map)
}

/// Start index and count for a span of `len` meters centered at `center`.
fn span(center: f64, len: f64, r_v: f64, limit: usize, what: &str) -> Result<(usize, usize)> {
    let n = voxels(len, r_v);
    if n < 1 {
        return Err(Error::InvalidParameter(format!(
            "{what} of {len} m is smaller than one voxel"
        )));
    }
    let start = (center / r_v - n as f64 / 2.0).round();
    if start < 0.0 || start as usize + n > limit {
        return Err(Error::InvalidParameter(format!("{what} does not fit in the map")));
    }
    Ok((start as usize, n))
}

fn room_window(map: &mut OccupancyMap, p: &EnvParams) -> Result<()> {
    let r_v = p.resolution;
    let [nx, ny, nz] = map.dims();
    let wall_x = p.wall_x.unwrap_or(p.size[0] / 2.0);
    let (wx0, wn) = span(wall_x, p.wall_thickness.max(r_v), r_v, nx, "wall")?;
    let [cy, cz] = p.window_center.unwrap_or([p.size[1] / 2.0, p.size[2] / 2.0]);
    let (jy0, jn) = span(cy, p.window[0], r_v, ny, "window width")?;
    let (kz0, kn) = span(cz, p.window[1], r_v, nz, "window height")?;
    for i in wx0..wx0 + wn {
        for j in 0..ny {
            for k in 0..nz {
                let in_window = (jy0..jy0 + jn).contains(&j) && (kz0..kz0 + kn).contains(&k);
                map.set_occupied(i, j, k, !in_window);
            }
        }
    }
    Ok(())
}

fn maze(map: &mut OccupancyMap, p: &EnvParams) -> Result<()> {
    let r_v = p.resolution;
    let [nx, ny, nz] = map.dims();
    let open = voxels(p.opening, r_v);
    if open < 1 {
        return Err(Error::InvalidParameter(format!(
            "opening of {} m is smaller than one voxel",
            p.opening
        )));
    }
    if open >= ny {
        return Err(Error::InvalidParameter("opening wider than the maze".into()));
    }
    for b in 0..p.baffles {
        let x = p.size[0] * (b + 1) as f64 / (p.baffles + 1) as f64;
        let (x0, n) = span(x, p.wall_thickness.max(r_v), r_v, nx, "baffle")?;
        // Even baffles leave the gap at high y, odd ones at low y.
        let solid = if b % 2 == 0 { 0..ny - open } else { open..ny };
        for i in x0..x0 + n {
            for j in solid.clone() {
                for k in 0..nz {
                    map.set_occupied(i, j, k, true);
                }
            }
        }
    }
    Ok(())
}

fn two_silo(map: &mut OccupancyMap, p: &EnvParams) -> Result<()> {
    if !(p.silo_gap > 0.0) || !(p.silo_radius > 0.0) {
        return Err(Error::InvalidParameter("silo radius and gap must be positive".into()));
    }
    if p.silo_gap < p.resolution {
        return Err(Error::InvalidParameter(format!(
            "silo gap of {} m is smaller than one voxel",
            p.silo_gap
        )));
    }
    let [nx, ny, nz] = map.dims();
    let cx = p.size[0] / 2.0;
    let offset = p.silo_gap / 2.0 + p.silo_radius;
    let axes = [(cx, p.size[1] / 2.0 - offset), (cx, p.size[1] / 2.0 + offset)];
    for j in 0..ny {
        for i in 0..nx {
            let c = map.voxel_center(i as i64, j as i64, 0);
            let inside = axes
                .iter()
                .any(|&(ax, ay)| (c.x - ax).hypot(c.y - ay) <= p.silo_radius);
            if inside {
                for k in 0..nz {
                    map.set_occupied(i, j, k, true);
                }
            }
        }
    }
    Ok(())
}
