//! Chain kinematics: forward kinematics, shape arithmetic and self-collision.
//!
//! Link angles are world-referenced. Link `i` points along
//! `R_z(yaw_i) R_y(pitch_i) e_x`, and unit `i + 1` trails unit `i` by
//! `link_length` against that direction, so the zero shape stretches the
//! chain along -x behind a head facing +x. Joint limits apply to the
//! differences between consecutive angles.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_diff, point_segment_distance, segment_segment_distance, wrap_angle, Vec3};
use crate::map::OccupancyMap;

/// Angle tolerance used when comparing shapes.
pub const ANGLE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainParams {
    /// Number of units N (at least 2).
    pub n_units: usize,
    /// Rigid link length between consecutive units, meters.
    pub link_length: f64,
    /// Clearance sphere radius of one unit.
    pub unit_radius: f64,
    /// Clearance radius of a link.
    pub link_radius: f64,
    /// Maximum relative pitch and yaw between neighbouring links, radians.
    pub joint_limit: f64,
    /// Number of azimuth rotations tried per library shape.
    pub n_psi: usize,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            n_units: 5,
            link_length: 1.0,
            unit_radius: 0.3,
            link_radius: 0.05,
            joint_limit: 1.4,
            n_psi: 8,
        }
    }
}

impl ChainParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.n_units < 2 {
            return bad(format!("chain needs at least 2 units, got {}", self.n_units));
        }
        if !(self.link_length > 2.0 * self.link_radius) {
            return bad("link length must exceed twice the link radius".into());
        }
        if !(self.unit_radius > 0.0) || !(self.link_radius > 0.0) {
            return bad("clearance radii must be positive".into());
        }
        if !(self.joint_limit > 0.0 && self.joint_limit <= std::f64::consts::FRAC_PI_2 + 1e-12) {
            return bad(format!("joint limit {} outside (0, pi/2]", self.joint_limit));
        }
        if self.n_psi == 0 {
            return bad("n_psi must be positive".into());
        }
        Ok(())
    }

    pub fn n_links(&self) -> usize {
        self.n_units - 1
    }

    /// Dimension of the shape space, 2N - 1.
    pub fn shape_dim(&self) -> usize {
        2 * self.n_units - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LinkAngles {
    pub pitch: f64,
    pub yaw: f64,
}

/// Shape of the chain: head yaw plus world-frame pitch/yaw of each link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapeConfig {
    pub head_yaw: f64,
    pub links: Vec<LinkAngles>,
}

impl ShapeConfig {
    /// All angles zero except the head yaw.
    pub fn straight(n_units: usize) -> Self {
        ShapeConfig {
            head_yaw: 0.0,
            links: vec![LinkAngles::default(); n_units.saturating_sub(1)],
        }
    }

    pub fn n_units(&self) -> usize {
        self.links.len() + 1
    }

    pub fn dim(&self) -> usize {
        1 + 2 * self.links.len()
    }

    /// Flattened as `[head_yaw, pitch_1, yaw_1, ..., pitch_{N-1}, yaw_{N-1}]`.
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.dim());
        v.push(self.head_yaw);
        for l in &self.links {
            v.push(l.pitch);
            v.push(l.yaw);
        }
        v
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.len() % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "shape vector must have odd length, got {}",
                values.len()
            )));
        }
        Ok(ShapeConfig {
            head_yaw: values[0],
            links: values[1..]
                .chunks(2)
                .map(|c| LinkAngles {
                    pitch: c[0],
                    yaw: c[1],
                })
                .collect(),
        })
    }

    /// Component-wise equality on the circle.
    pub fn approx_eq(&self, other: &ShapeConfig, tol: f64) -> bool {
        self.links.len() == other.links.len()
            && self
                .to_vec()
                .iter()
                .zip(other.to_vec())
                .all(|(a, b)| angle_diff(*a, b).abs() <= tol)
    }

    fn check_same(&self, other: &ShapeConfig) -> Result<()> {
        if self.links.len() != other.links.len() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Full configuration: head position plus shape, dimension 2N + 2.
#[derive(Debug, Clone, PartialEq)]
pub struct FullConfig {
    pub head: Vec3,
    pub shape: ShapeConfig,
}

impl FullConfig {
    pub fn new(head: Vec3, shape: ShapeConfig) -> Self {
        FullConfig { head, shape }
    }

    pub fn dim(&self) -> usize {
        3 + self.shape.dim()
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.head.x, self.head.y, self.head.z];
        v.extend(self.shape.to_vec());
        v
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        if values.len() < 4 {
            return Err(Error::InvalidParameter("configuration vector too short".into()));
        }
        Ok(FullConfig {
            head: Vec3::new(values[0], values[1], values[2]),
            shape: ShapeConfig::from_slice(&values[3..])?,
        })
    }
}

/// World positions of every unit; link `i` spans units `i` and `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainPose {
    pub units: Vec<Vec3>,
}

impl ChainPose {
    pub fn links(&self) -> impl Iterator<Item = (&Vec3, &Vec3)> + '_ {
        self.units.windows(2).map(|w| (&w[0], &w[1]))
    }
}

/// Unit vector of a link with the given world pitch and yaw.
#[inline]
pub fn link_direction(l: &LinkAngles) -> Vec3 {
    let (sp, cp) = l.pitch.sin_cos();
    let (sy, cy) = l.yaw.sin_cos();
    Vec3::new(cy * cp, sy * cp, -sp)
}

pub(crate) fn pose_of(head: &Vec3, shape: &ShapeConfig, link_length: f64) -> ChainPose {
    let mut units = Vec::with_capacity(shape.links.len() + 1);
    let mut p = *head;
    units.push(p);
    for l in &shape.links {
        p -= link_direction(l) * link_length;
        units.push(p);
    }
    ChainPose { units }
}

pub fn forward_kinematics(cfg: &FullConfig, params: &ChainParams) -> Result<ChainPose> {
    if cfg.shape.n_units() != params.n_units {
        return Err(Error::DimensionMismatch {
            expected: params.shape_dim(),
            found: cfg.shape.dim(),
        });
    }
    Ok(pose_of(&cfg.head, &cfg.shape, params.link_length))
}

/// Rotates the whole shape about the head's vertical axis.
pub fn rotate_azimuth(shape: &ShapeConfig, delta: f64) -> ShapeConfig {
    ShapeConfig {
        head_yaw: wrap_angle(shape.head_yaw + delta),
        links: shape
            .links
            .iter()
            .map(|l| LinkAngles {
                pitch: l.pitch,
                yaw: wrap_angle(l.yaw + delta),
            })
            .collect(),
    }
}

/// Linear interpolation along the shortest arc of every angle.
pub fn interpolate(a: &ShapeConfig, b: &ShapeConfig, t: f64) -> Result<ShapeConfig> {
    a.check_same(b)?;
    Ok(interpolate_unchecked(a, b, t))
}

pub(crate) fn interpolate_unchecked(a: &ShapeConfig, b: &ShapeConfig, t: f64) -> ShapeConfig {
    if t == 0.0 {
        return a.clone();
    }
    if t == 1.0 {
        return b.clone();
    }
    let lerp = |x: f64, y: f64| wrap_angle(x + t * angle_diff(y, x));
    ShapeConfig {
        head_yaw: lerp(a.head_yaw, b.head_yaw),
        links: a
            .links
            .iter()
            .zip(&b.links)
            .map(|(la, lb)| LinkAngles {
                pitch: lerp(la.pitch, lb.pitch),
                yaw: lerp(la.yaw, lb.yaw),
            })
            .collect(),
    }
}

/// Relative-angle check between head heading and link 1 and between
/// consecutive links. The head is taken as level (zero pitch).
pub fn within_joint_limits(shape: &ShapeConfig, params: &ChainParams) -> bool {
    let lim = params.joint_limit + ANGLE_TOL;
    let mut prev = LinkAngles {
        pitch: 0.0,
        yaw: shape.head_yaw,
    };
    for l in &shape.links {
        if angle_diff(l.pitch, prev.pitch).abs() > lim || angle_diff(l.yaw, prev.yaw).abs() > lim {
            return false;
        }
        prev = *l;
    }
    true
}

/// Self-collision test on a pose with every clearance grown by `margin`.
pub(crate) fn pose_self_collision_free(pose: &ChainPose, params: &ChainParams, margin: f64) -> bool {
    let u = &pose.units;
    let n = u.len();
    let unit_gap = 2.0 * params.unit_radius + margin;
    let link_gap = 2.0 * params.link_radius + margin;
    let mixed_gap = params.unit_radius + params.link_radius + margin;
    for i in 0..n {
        for j in i + 2..n {
            if (u[i] - u[j]).norm() < unit_gap {
                return false;
            }
        }
    }
    for i in 0..n - 1 {
        for j in i + 2..n - 1 {
            if segment_segment_distance(&u[i], &u[i + 1], &u[j], &u[j + 1]) < link_gap {
                return false;
            }
        }
    }
    for k in 0..n {
        for i in 0..n - 1 {
            if k == i || k == i + 1 {
                continue;
            }
            if point_segment_distance(&u[k], &u[i], &u[i + 1]) < mixed_gap {
                return false;
            }
        }
    }
    true
}

pub fn self_collision_free(shape: &ShapeConfig, params: &ChainParams) -> bool {
    pose_self_collision_free(&pose_of(&Vec3::zeros(), shape, params.link_length), params, 0.0)
}

/// Self-collision test at `steps` evenly spaced points of the straight
/// shape-space edge, endpoints included.
pub fn transition_self_collision_free(
    a: &ShapeConfig,
    b: &ShapeConfig,
    params: &ChainParams,
    steps: usize,
) -> bool {
    let steps = steps.max(2);
    (0..steps).all(|s| {
        let t = s as f64 / (steps - 1) as f64;
        self_collision_free(&interpolate_unchecked(a, b, t), params)
    })
}

/// Weighted shape distance: the head yaw has weight N and link `i`
/// (1-based) weight N - i, so angles near the head cost more to change.
/// Differences are taken along the shortest arc.
pub fn cost_to_transition(a: &ShapeConfig, b: &ShapeConfig) -> Result<f64> {
    a.check_same(b)?;
    Ok(cost_unchecked(a, b))
}

pub(crate) fn cost_unchecked(a: &ShapeConfig, b: &ShapeConfig) -> f64 {
    let n = a.n_units() as f64;
    let dh = angle_diff(b.head_yaw, a.head_yaw);
    let mut sum = n * dh * dh;
    for (i, (la, lb)) in a.links.iter().zip(&b.links).enumerate() {
        let w = n - (i + 1) as f64;
        let dp = angle_diff(lb.pitch, la.pitch);
        let dy = angle_diff(lb.yaw, la.yaw);
        sum += w * (dp * dp + dy * dy);
    }
    sum.sqrt()
}

/// Map test of a pose with explicit unit and link clearance radii.
pub(crate) fn pose_map_free(pose: &ChainPose, map: &OccupancyMap, unit_radius: f64, link_radius: f64) -> bool {
    pose.units.iter().all(|p| map.sphere_free(p, unit_radius))
        && pose.links().all(|(a, b)| map.segment_free(a, b, link_radius))
}

/// Every unit sphere and link capsule of the configuration is free in `map`.
pub fn chain_collision_free(cfg: &FullConfig, params: &ChainParams, map: &OccupancyMap) -> bool {
    let pose = pose_of(&cfg.head, &cfg.shape, params.link_length);
    pose_map_free(&pose, map, params.unit_radius, params.link_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Rotation3, Vector3};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn params(n: usize, l: f64) -> ChainParams {
        ChainParams {
            n_units: n,
            link_length: l,
            ..ChainParams::default()
        }
    }

    /// Independent FK: compose explicit rotation matrices about z then y.
    fn fk_oracle(cfg: &FullConfig, l: f64) -> Vec<Vec3> {
        let mut out = vec![cfg.head];
        let mut p = cfg.head;
        for link in &cfg.shape.links {
            let rz = Rotation3::from_axis_angle(&Vector3::z_axis(), link.yaw);
            let ry = Rotation3::from_axis_angle(&Vector3::y_axis(), link.pitch);
            p -= (rz * ry) * Vec3::new(l, 0.0, 0.0);
            out.push(p);
        }
        out
    }

    fn shape(head_yaw: f64, angles: &[(f64, f64)]) -> ShapeConfig {
        ShapeConfig {
            head_yaw,
            links: angles.iter().map(|&(pitch, yaw)| LinkAngles { pitch, yaw }).collect(),
        }
    }

    #[test]
    fn fk_straight_chain() {
        let cfg = FullConfig::new(Vec3::zeros(), ShapeConfig::straight(3));
        let pose = forward_kinematics(&cfg, &params(3, 1.0)).unwrap();
        assert_eq!(pose.units, vec![Vec3::zeros(), Vec3::new(-1.0, 0.0, 0.0), Vec3::new(-2.0, 0.0, 0.0)]);
    }

    #[test]
    fn fk_sign_conventions_match_matrix_oracle() {
        let p = params(2, 1.0);
        let yawed = FullConfig::new(Vec3::zeros(), shape(0.0, &[(0.0, FRAC_PI_2)]));
        let pose = forward_kinematics(&yawed, &p).unwrap();
        assert!((pose.units[1] - fk_oracle(&yawed, 1.0)[1]).norm() < 1e-12);
        assert!((pose.units[1] - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-12);

        // R_y(pi/2) e_x = -e_z, so the trailing unit sits above the head.
        let pitched = FullConfig::new(Vec3::zeros(), shape(0.0, &[(FRAC_PI_2, 0.0)]));
        let pose = forward_kinematics(&pitched, &p).unwrap();
        assert!((pose.units[1] - fk_oracle(&pitched, 1.0)[1]).norm() < 1e-12);
        assert!((pose.units[1] - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn fk_dimension_mismatch() {
        let cfg = FullConfig::new(Vec3::zeros(), ShapeConfig::straight(3));
        assert!(matches!(
            forward_kinematics(&cfg, &params(4, 1.0)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rotate_azimuth_cases() {
        let li = ShapeConfig::straight(3);
        assert_eq!(rotate_azimuth(&li, 0.0), li);
        assert!(rotate_azimuth(&li, 2.0 * PI).approx_eq(&li, 1e-12));
        let rotated = rotate_azimuth(&li, FRAC_PI_2);
        let pose = pose_of(&Vec3::zeros(), &rotated, 1.0);
        assert!((pose.units[1] - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-12);
        assert!((pose.units[2] - Vec3::new(0.0, -2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn interpolate_cases() {
        let a = shape(0.0, &[(0.0, 0.0)]);
        let b = shape(0.0, &[(0.0, FRAC_PI_2)]);
        assert_eq!(interpolate(&a, &b, 0.0).unwrap(), a);
        assert_eq!(interpolate(&a, &b, 1.0).unwrap(), b);
        assert!((interpolate(&a, &b, 0.5).unwrap().links[0].yaw - FRAC_PI_4).abs() < 1e-12);

        // 3 -> -3 goes through pi, not through 0.
        let a = shape(3.0, &[(0.0, 0.0)]);
        let b = shape(-3.0, &[(0.0, 0.0)]);
        let mid = interpolate(&a, &b, 0.5).unwrap().head_yaw;
        assert!(angle_diff(mid, PI).abs() < 1e-12, "mid = {mid}");
        assert!(interpolate(&a, &ShapeConfig::straight(4), 0.5).is_err());
    }

    #[test]
    fn self_collision_cases() {
        let p = ChainParams {
            n_units: 6,
            link_length: 1.0,
            unit_radius: 0.3,
            ..ChainParams::default()
        };
        assert!(self_collision_free(&ShapeConfig::straight(6), &p));
        // Link 2 folded back onto link 1.
        let folded = shape(0.0, &[(0.0, 0.0), (0.0, PI), (0.0, PI), (0.0, PI), (0.0, PI)]);
        assert!(!self_collision_free(&folded, &p));
        // Open hexagon: consecutive headings turn by 60 degrees.
        let hex = ShapeConfig {
            head_yaw: 0.0,
            links: (0..5).map(|i| LinkAngles { pitch: 0.0, yaw: i as f64 * PI / 3.0 }).collect(),
        };
        let pose = pose_of(&Vec3::zeros(), &hex, 1.0);
        let min_gap = (0..6)
            .flat_map(|i| (i + 2..6).map(move |j| (i, j)))
            .map(|(i, j)| (pose.units[i] - pose.units[j]).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((min_gap - 1.0).abs() < 1e-9);
        assert!(self_collision_free(&hex, &p));
    }

    #[test]
    fn transition_sweeps() {
        let p = params(5, 1.0);
        let li = ShapeConfig::straight(5);
        assert!(transition_self_collision_free(&li, &li, &p, 32));
        assert!(transition_self_collision_free(&li, &rotate_azimuth(&li, FRAC_PI_4), &p, 32));

        // Both ends free, but the straight edge folds link 2 through link 1:
        // yaw of link 2 goes 0.8 pi -> -0.8 pi via pi.
        let a = shape(0.0, &[(0.0, 0.0), (0.0, 0.8 * PI), (0.0, 0.8 * PI), (0.0, 0.8 * PI)]);
        let b = shape(0.0, &[(0.0, 0.0), (0.0, -0.8 * PI), (0.0, -0.8 * PI), (0.0, -0.8 * PI)]);
        let q = ChainParams { unit_radius: 0.2, ..p.clone() };
        assert!(self_collision_free(&a, &q) && self_collision_free(&b, &q));
        assert!(!self_collision_free(&interpolate(&a, &b, 0.5).unwrap(), &q));
        assert!(!transition_self_collision_free(&a, &b, &q, 32));
    }

    #[test]
    fn joint_limit_checks() {
        let p = ChainParams { joint_limit: 0.5, ..params(3, 1.0) };
        assert!(within_joint_limits(&shape(0.3, &[(0.2, 0.5), (0.6, 0.9)]), &p));
        assert!(!within_joint_limits(&shape(0.0, &[(0.0, 0.6), (0.0, 0.6)]), &p));
        assert!(!within_joint_limits(&shape(0.0, &[(0.6, 0.0), (0.6, 0.0)]), &p));
        // Wrap-around differences are measured on the circle.
        assert!(within_joint_limits(&shape(3.1, &[(0.0, -3.1), (0.0, -2.9)]), &p));
    }

    #[test]
    fn chain_map_collisions() {
        let mut map = OccupancyMap::new(Vec3::zeros(), [50, 50, 20], 0.2).unwrap();
        let p = params(5, 1.0);
        let cfg = FullConfig::new(Vec3::new(8.0, 5.0, 2.0), ShapeConfig::straight(5));
        assert!(chain_collision_free(&cfg, &p, &map));
        map.fill_box(Vec3::new(7.9, 0.0, 0.0), Vec3::new(8.1, 10.0, 4.0), true);
        assert!(!chain_collision_free(&cfg, &p, &map));
    }

    #[test]
    fn cost_to_transition_by_hand() {
        let li2 = ShapeConfig::straight(2);
        assert_eq!(cost_to_transition(&li2, &li2).unwrap(), 0.0);
        let turned = ShapeConfig { head_yaw: 1.0, ..li2.clone() };
        assert!((cost_to_transition(&li2, &turned).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        let li3 = ShapeConfig::straight(3);
        let bent = shape(0.0, &[(0.0, 0.0), (0.0, 1.0)]);
        assert!((cost_to_transition(&li3, &bent).unwrap() - 1.0).abs() < 1e-12);
        assert!(cost_to_transition(&li3, &li2).is_err());
    }

    fn arb_shape(n: usize) -> impl Strategy<Value = ShapeConfig> {
        (-PI..PI, proptest::collection::vec((-PI..PI, -PI..PI), n - 1)).prop_map(|(h, l)| ShapeConfig {
            head_yaw: h,
            links: l.into_iter().map(|(pitch, yaw)| LinkAngles { pitch, yaw }).collect(),
        })
    }

    proptest! {
        #[test]
        fn fk_matches_oracle_and_keeps_link_length(s in arb_shape(6), x in -5.0..5.0f64, l in 0.3..2.0f64) {
            let cfg = FullConfig::new(Vec3::new(x, 1.0, -x), s);
            let p = params(6, l);
            let pose = forward_kinematics(&cfg, &p).unwrap();
            for (a, b) in pose.units.iter().zip(fk_oracle(&cfg, l)) {
                prop_assert!((a - b).norm() < 1e-9);
            }
            for (a, b) in pose.links() {
                prop_assert!(((a - b).norm() - l).abs() < 1e-9);
            }
        }

        #[test]
        fn rotation_is_rigid_about_head(s in arb_shape(5), delta in -7.0..7.0f64) {
            let head = Vec3::new(1.0, 2.0, 3.0);
            let before = pose_of(&head, &s, 0.7);
            let after = pose_of(&head, &rotate_azimuth(&s, delta), 0.7);
            let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), delta);
            for (b, a) in before.units.iter().zip(&after.units) {
                prop_assert!((head + rot * (b - head) - a).norm() < 1e-9);
            }
        }

        #[test]
        fn interpolation_is_symmetric(a in arb_shape(4), b in arb_shape(4), t in 0.0..1.0f64) {
            let ab = interpolate(&a, &b, t).unwrap();
            let ba = interpolate(&b, &a, 1.0 - t).unwrap();
            prop_assert!(ab.approx_eq(&ba, 1e-9));
        }
    }
}
