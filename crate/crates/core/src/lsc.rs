//! Library of engineered chain shapes.
//!
//! Every shape is built with its principal axis along -x behind the head.
//! The head yaw always equals the yaw of the first link.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kinematics::{self_collision_free, within_joint_limits, ChainParams, LinkAngles, ShapeConfig, ANGLE_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeTag {
    /// Straight line.
    Li,
    /// Serpentine in the horizontal plane, first bend to +yaw.
    Se,
    /// Mirror of `Se`.
    Sm,
    /// Serpentine in the vertical plane.
    Sv,
    /// Quarter-turn arc.
    Ca,
    /// Open regular polygon.
    Pn,
}

impl ShapeTag {
    pub const ALL: [ShapeTag; 6] = [ShapeTag::Li, ShapeTag::Se, ShapeTag::Sm, ShapeTag::Sv, ShapeTag::Ca, ShapeTag::Pn];

    pub fn as_str(self) -> &'static str {
        match self {
            ShapeTag::Li => "LI",
            ShapeTag::Se => "SE",
            ShapeTag::Sm => "SM",
            ShapeTag::Sv => "SV",
            ShapeTag::Ca => "CA",
            ShapeTag::Pn => "PN",
        }
    }
}

impl fmt::Display for ShapeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShapeTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown shape tag `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SerpentinePlane {
    XyPos,
    XyNeg,
    Xz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeLibrary {
    pub entries: Vec<(ShapeTag, ShapeConfig)>,
    pub params: ChainParams,
}

impl ShapeLibrary {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, tag: ShapeTag) -> Option<&ShapeConfig> {
        self.entries.iter().find(|(t, _)| *t == tag).map(|(_, s)| s)
    }
}

fn from_yaws(yaws: impl IntoIterator<Item = f64>) -> ShapeConfig {
    let links: Vec<LinkAngles> = yaws.into_iter().map(|yaw| LinkAngles { pitch: 0.0, yaw }).collect();
    ShapeConfig {
        head_yaw: links.first().map_or(0.0, |l| l.yaw),
        links,
    }
}

pub fn make_li(params: &ChainParams) -> ShapeConfig {
    ShapeConfig::straight(params.n_units)
}

/// Alternating bends of amplitude `joint_limit / 2`, so neighbouring links
/// differ by exactly the joint limit.
pub fn make_serpentine(params: &ChainParams, plane: SerpentinePlane) -> ShapeConfig {
    let alpha = params.joint_limit / 2.0;
    let sign = |i: usize| if i % 2 == 0 { 1.0 } else { -1.0 };
    match plane {
        SerpentinePlane::XyPos => from_yaws((0..params.n_links()).map(|i| alpha * sign(i))),
        SerpentinePlane::XyNeg => from_yaws((0..params.n_links()).map(|i| -alpha * sign(i))),
        SerpentinePlane::Xz => ShapeConfig {
            head_yaw: 0.0,
            links: (0..params.n_links())
                .map(|i| LinkAngles {
                    pitch: alpha * sign(i),
                    yaw: 0.0,
                })
                .collect(),
        },
    }
}

/// Link headings turn uniformly through a quarter turn (less if the joint
/// limit is tighter), symmetric about -x.
pub fn make_arc(params: &ChainParams) -> Result<ShapeConfig> {
    let n = params.n_units;
    if n < 3 {
        return Err(Error::ArcTooShort(n));
    }
    let delta = (FRAC_PI_2 / (n - 2) as f64).min(params.joint_limit);
    let start = -((n - 2) as f64) * delta / 2.0;
    Ok(from_yaws((0..n - 1).map(|i| start + i as f64 * delta)))
}

/// Units on the vertices of a regular N-gon with side `link_length`; the side
/// between the first and last unit stays open.
pub fn make_polygon(params: &ChainParams) -> Result<ShapeConfig> {
    let n = params.n_units;
    if n < 3 {
        return Err(Error::InvalidParameter(format!("polygon needs at least 3 units, got {n}")));
    }
    let exterior = 2.0 * PI / n as f64;
    if exterior > params.joint_limit + ANGLE_TOL {
        return Err(Error::InfeasiblePolygon {
            exterior,
            limit: params.joint_limit,
        });
    }
    let start = -((n - 2) as f64) * PI / n as f64;
    Ok(from_yaws((0..n - 1).map(|i| start + i as f64 * exterior)))
}

/// Library in the order LI, SE, SM, SV, CA, PN, dropping shapes that cannot
/// be built or that violate joint limits or self-collide.
pub fn build_library(params: &ChainParams) -> ShapeLibrary {
    let candidates = [
        (ShapeTag::Li, Ok(make_li(params))),
        (ShapeTag::Se, Ok(make_serpentine(params, SerpentinePlane::XyPos))),
        (ShapeTag::Sm, Ok(make_serpentine(params, SerpentinePlane::XyNeg))),
        (ShapeTag::Sv, Ok(make_serpentine(params, SerpentinePlane::Xz))),
        (ShapeTag::Ca, make_arc(params)),
        (ShapeTag::Pn, make_polygon(params)),
    ];
    let entries = candidates
        .into_iter()
        .filter_map(|(tag, shape)| match shape {
            Ok(s) if within_joint_limits(&s, params) && self_collision_free(&s, params) => Some((tag, s)),
            Ok(_) => {
                log::debug!("dropping {tag}: joint limit or self-collision");
                None
            }
            Err(e) => {
                log::debug!("dropping {tag}: {e}");
                None
            }
        })
        .collect();
    ShapeLibrary {
        entries,
        params: params.clone(),
    }
}
