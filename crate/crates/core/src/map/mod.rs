//! Voxel occupancy map and the collision queries issued against it.
//!
//! The grid is dense and stored x-fastest. Anything outside the grid is
//! treated as occupied, so the map boundary behaves like a closed wall.

mod envgen;
mod io;

pub use envgen::{generate_environment, EnvKind, EnvParams};
pub use io::{load_map, map_from_str, map_to_string, save_map};

use crate::error::{Error, Result};
use crate::geometry::{point_aabb_distance, Vec3};

const HALF_DIAGONAL: f64 = 0.866_025_403_784_438_6; // sqrt(3) / 2

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyMap {
    origin: Vec3,
    dims: [usize; 3],
    resolution: f64,
    cells: Vec<bool>,
}

/// Swept-segment primitive: every point within `radius` of the segment `a`-`b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub a: Vec3,
    pub b: Vec3,
    pub radius: f64,
}

impl Capsule {
    pub fn new(a: Vec3, b: Vec3, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "capsule radius must be positive, got {radius}"
            )));
        }
        Ok(Capsule { a, b, radius })
    }
}

impl OccupancyMap {
    /// An all-free map.
    pub fn new(origin: Vec3, dims: [usize; 3], resolution: f64) -> Result<Self> {
        let cells = vec![false; dims.iter().product()];
        Self::from_cells(origin, dims, resolution, cells)
    }

    pub fn from_cells(
        origin: Vec3,
        dims: [usize; 3],
        resolution: f64,
        cells: Vec<bool>,
    ) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidParameter(format!(
                "map dimensions must be positive, got {dims:?}"
            )));
        }
        if !(resolution > 0.0) || !resolution.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "voxel edge must be positive, got {resolution}"
            )));
        }
        let expected = dims[0] * dims[1] * dims[2];
        if cells.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: cells.len(),
            });
        }
        Ok(OccupancyMap {
            origin,
            dims,
            resolution,
            cells,
        })
    }

    pub fn origin(&self) -> Vec3 {
        self.origin
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    /// Voxel edge length in meters.
    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    /// Lower and upper corners of the mapped volume.
    pub fn bounds(&self) -> (Vec3, Vec3) {
        let extent = Vec3::new(
            self.dims[0] as f64,
            self.dims[1] as f64,
            self.dims[2] as f64,
        ) * self.resolution;
        (self.origin, self.origin + extent)
    }

    pub fn volume(&self) -> f64 {
        self.cells.len() as f64 * self.resolution.powi(3)
    }

    pub fn occupied_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    #[inline]
    fn linear(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    /// Occupancy by signed voxel index; out-of-range indices count as occupied.
    #[inline]
    pub fn occupied_at(&self, i: i64, j: i64, k: i64) -> bool {
        if i < 0 || j < 0 || k < 0 {
            return true;
        }
        let (i, j, k) = (i as usize, j as usize, k as usize);
        if i >= self.dims[0] || j >= self.dims[1] || k >= self.dims[2] {
            return true;
        }
        self.cells[self.linear(i, j, k)]
    }

    pub fn set_occupied(&mut self, i: usize, j: usize, k: usize, occupied: bool) {
        let idx = self.linear(i, j, k);
        self.cells[idx] = occupied;
    }

    /// Marks every voxel whose center lies inside the closed box `[lo, hi]`.
    pub fn fill_box(&mut self, lo: Vec3, hi: Vec3, occupied: bool) {
        for k in 0..self.dims[2] {
            for j in 0..self.dims[1] {
                for i in 0..self.dims[0] {
                    let c = self.voxel_center(i as i64, j as i64, k as i64);
                    if (0..3).all(|a| c[a] >= lo[a] && c[a] <= hi[a]) {
                        self.set_occupied(i, j, k, occupied);
                    }
                }
            }
        }
    }

    /// Signed index of the voxel containing `p` (may lie outside the grid).
    #[inline]
    pub fn voxel_of(&self, p: &Vec3) -> [i64; 3] {
        let r = (p - self.origin) / self.resolution;
        [r.x.floor() as i64, r.y.floor() as i64, r.z.floor() as i64]
    }

    #[inline]
    pub fn voxel_center(&self, i: i64, j: i64, k: i64) -> Vec3 {
        self.origin
            + Vec3::new(i as f64 + 0.5, j as f64 + 0.5, k as f64 + 0.5) * self.resolution
    }

    /// True iff `p` falls in an occupied voxel or outside the grid.
    pub fn point_occupied(&self, p: &Vec3) -> bool {
        if !p.iter().all(|v| v.is_finite()) {
            return true;
        }
        let [i, j, k] = self.voxel_of(p);
        self.occupied_at(i, j, k)
    }

    /// Conservative sphere test.
    ///
    /// Every voxel whose center is within `radius + r_v * sqrt(3) / 2` of
    /// `center` must be free and inside the grid.
    pub fn sphere_free(&self, center: &Vec3, radius: f64) -> bool {
        if !center.iter().all(|v| v.is_finite()) {
            return false;
        }
        let reach = radius + self.resolution * HALF_DIAGONAL;
        let reach2 = reach * reach;
        let lo = self.voxel_of(&(center - Vec3::repeat(reach)));
        let hi = self.voxel_of(&(center + Vec3::repeat(reach)));
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    let c = self.voxel_center(i, j, k);
                    if (c - center).norm_squared() <= reach2 && self.occupied_at(i, j, k) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Conservative capsule test: sphere tests at samples spaced at most `r_v / 2`.
    ///
    /// Each sample radius is grown to `sqrt(r^2 + (s/2)^2)` for spacing `s`, which
    /// covers every ball centered between two neighbouring samples.
    pub fn capsule_free(&self, capsule: &Capsule) -> bool {
        let ab = capsule.b - capsule.a;
        let len = ab.norm();
        let max_step = self.resolution / 2.0;
        let n = ((len / max_step).ceil() as usize).max(1);
        let spacing = len / n as f64;
        let r = (capsule.radius * capsule.radius + 0.25 * spacing * spacing).sqrt();
        (0..=n).all(|s| {
            let p = capsule.a + ab * (s as f64 / n as f64);
            self.sphere_free(&p, r)
        })
    }

    /// Head-unit translation check along `a`-`b`.
    pub fn segment_free(&self, a: &Vec3, b: &Vec3, radius: f64) -> bool {
        self.capsule_free(&Capsule {
            a: *a,
            b: *b,
            radius,
        })
    }

    /// Exact ball test: false iff some occupied voxel box, or the space outside
    /// the grid, comes strictly closer than `radius` to `center`.
    pub fn ball_clear_exact(&self, center: &Vec3, radius: f64) -> bool {
        let (blo, bhi) = self.bounds();
        for a in 0..3 {
            if center[a] - radius < blo[a] || center[a] + radius > bhi[a] {
                return false;
            }
        }
        let lo = self.voxel_of(&(center - Vec3::repeat(radius)));
        let hi = self.voxel_of(&(center + Vec3::repeat(radius)));
        let half = Vec3::repeat(self.resolution / 2.0);
        for k in lo[2]..=hi[2] {
            for j in lo[1]..=hi[1] {
                for i in lo[0]..=hi[0] {
                    if !self.occupied_at(i, j, k) {
                        continue;
                    }
                    let c = self.voxel_center(i, j, k);
                    if point_aabb_distance(center, &(c - half), &(c + half)) < radius {
                        return false;
                    }
                }
            }
        }
        true
    }
}
