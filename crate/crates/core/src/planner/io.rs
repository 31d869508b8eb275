//! `ARCPLAN v1` plan files and stats CSV rows.
//!
//! ```text
//! ARCPLAN v1
//! # free-form comment lines
//! mode both
//! n_units 5
//! waypoints 3
//! S start <head x y z> <head yaw> <pitch yaw per link>
//! R CA@2 ...
//! T CA@2 ...
//! stats <t_g> <t_p> <shape_changes> <replans> <success 0|1>
//! end
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{PlanMode, PlanResult, PlanStats, ShapeSource, Waypoint, WaypointKind};
use crate::error::{Error, Result};
use crate::kinematics::FullConfig;

pub const PLAN_HEADER: &str = "ARCPLAN v1";

pub fn plan_to_string(result: &PlanResult, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(PLAN_HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let n_units = result.waypoints.first().map_or(0, |w| w.config.shape.n_units());
    let _ = writeln!(out, "mode {}", result.mode);
    let _ = writeln!(out, "n_units {n_units}");
    let _ = writeln!(out, "waypoints {}", result.waypoints.len());
    for w in &result.waypoints {
        let nums: Vec<String> = w.config.to_vec().iter().map(|v| format!("{v:.16e}")).collect();
        let _ = writeln!(out, "{} {} {}", w.kind.tag(), w.source, nums.join(" "));
    }
    let s = &result.stats;
    let _ = writeln!(
        out,
        "stats {:?} {:?} {} {} {}",
        s.t_g,
        s.t_p,
        s.shape_changes,
        s.replans,
        u8::from(s.success)
    );
    out.push_str("end\n");
    out
}

pub fn save_plan(result: &PlanResult, path: &Path, comments: &[String]) -> Result<()> {
    std::fs::write(path, plan_to_string(result, comments)).map_err(|e| Error::io(path, e))
}

pub fn load_plan(path: &Path) -> Result<PlanResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    plan_from_str(&text)
}

fn num<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::parse(line, format!("bad number `{s}`")))
}

pub fn plan_from_str(text: &str) -> Result<PlanResult> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let last = text.lines().count();
    let mut pos = 0;
    let mut next = |what: &str| {
        let l = lines
            .get(pos)
            .copied()
            .ok_or_else(|| Error::parse(last, format!("unexpected end of file, expected {what}")));
        pos += 1;
        l
    };

    let (n, header) = next("header")?;
    if header != PLAN_HEADER {
        return if header.starts_with("ARCPLAN") {
            Err(Error::Version(header.to_string()))
        } else {
            Err(Error::parse(n, "missing ARCPLAN header"))
        };
    }
    let keyed = |line: Result<(usize, &str)>, key: &str| -> Result<(usize, String)> {
        let (n, l) = line?;
        match l.split_once(' ') {
            Some((k, rest)) if k == key => Ok((n, rest.trim().to_string())),
            _ => Err(Error::parse(n, format!("expected `{key}`"))),
        }
    };
    let (n, mode) = keyed(next("mode"), "mode")?;
    let mode: PlanMode = mode.parse().map_err(|_| Error::parse(n, format!("unknown mode `{mode}`")))?;
    let (n, units) = keyed(next("n_units"), "n_units")?;
    let n_units: usize = num(n, &units)?;
    let (n, count) = keyed(next("waypoints"), "waypoints")?;
    let count: usize = num(n, &count)?;
    let dim = 2 * n_units + 2;
    let mut waypoints = Vec::with_capacity(count);
    for _ in 0..count {
        let (n, l) = next("waypoint")?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() < 2 {
            return Err(Error::parse(n, "waypoint needs a kind and a source"));
        }
        let kind = WaypointKind::from_tag(toks[0]).ok_or_else(|| Error::parse(n, format!("unknown kind `{}`", toks[0])))?;
        let source: ShapeSource = toks[1].parse().map_err(|_| Error::parse(n, format!("bad source `{}`", toks[1])))?;
        if toks.len() - 2 != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: toks.len() - 2,
            });
        }
        let v: Vec<f64> = toks[2..].iter().map(|t| num(n, t)).collect::<Result<_>>()?;
        waypoints.push(Waypoint {
            kind,
            config: FullConfig::from_slice(&v)?,
            source,
        });
    }
    let (n, stats) = keyed(next("stats"), "stats")?;
    let toks: Vec<&str> = stats.split_whitespace().collect();
    if toks.len() != 5 {
        return Err(Error::parse(n, "stats needs five fields"));
    }
    let stats = PlanStats {
        t_g: num(n, toks[0])?,
        t_p: num(n, toks[1])?,
        shape_changes: num(n, toks[2])?,
        replans: num(n, toks[3])?,
        success: match toks[4] {
            "1" => true,
            "0" => false,
            s => return Err(Error::parse(n, format!("bad success flag `{s}`"))),
        },
    };
    let (n, end) = next("end")?;
    if end != "end" {
        return Err(Error::parse(n, "expected `end`"));
    }
    Ok(PlanResult { mode, waypoints, stats })
}

pub fn stats_csv_header() -> &'static str {
    "seed,mode,N,m_v,n_srs,t_G,t_P,shape_changes,replans,success"
}

pub fn stats_csv_row(seed: u64, mode: PlanMode, n_units: usize, m_v: usize, n_srs: usize, stats: &PlanStats) -> String {
    format!(
        "{seed},{mode},{n_units},{m_v},{n_srs},{:.6},{:.6},{},{},{}",
        stats.t_g,
        stats.t_p,
        stats.shape_changes,
        stats.replans,
        u8::from(stats.success)
    )
}
