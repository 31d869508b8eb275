//! `ARCMAP v1` text format.
//!
//! ```text
//! ARCMAP v1
//! origin <x> <y> <z>
//! dims <nx> <ny> <nz>
//! r_v <edge>
//! <occupied 0|1> <run length>      (one run per line, x-fastest order)
//! ...
//! end
//! ```
//! Lines starting with `#` are comments and may appear anywhere.

use std::fmt::Write as _;
use std::path::Path;

use super::OccupancyMap;
use crate::error::{Error, Result};
use crate::geometry::Vec3;

pub const MAP_HEADER: &str = "ARCMAP v1";

pub fn save_map(map: &OccupancyMap, path: &Path) -> Result<()> {
    std::fs::write(path, map_to_string(map, &[])).map_err(|e| Error::io(path, e))
}

pub fn load_map(path: &Path) -> Result<OccupancyMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    map_from_str(&text)
}

/// Serializes the map; `comments` are echoed as `#` lines after the header.
pub fn map_to_string(map: &OccupancyMap, comments: &[String]) -> String {
    let mut out = String::new();
    out.push_str(MAP_HEADER);
    out.push('\n');
    for c in comments {
        let _ = writeln!(out, "# {c}");
    }
    let o = map.origin();
    let d = map.dims();
    let _ = writeln!(out, "origin {:?} {:?} {:?}", o.x, o.y, o.z);
    let _ = writeln!(out, "dims {} {} {}", d[0], d[1], d[2]);
    let _ = writeln!(out, "r_v {:?}", map.resolution());
    let cells = map.cells();
    let mut i = 0;
    while i < cells.len() {
        let v = cells[i];
        let start = i;
        while i < cells.len() && cells[i] == v {
            i += 1;
        }
        let _ = writeln!(out, "{} {}", v as u8, i - start);
    }
    out.push_str("end\n");
    out
}

pub fn map_from_str(text: &str) -> Result<OccupancyMap> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::parse(text.lines().count() + 1, format!("unexpected end of file, expected {what}")))
    };

    let (n, header) = next("header")?;
    if header != MAP_HEADER {
        if header.starts_with("ARCMAP") {
            return Err(Error::Version(header.to_string()));
        }
        return Err(Error::parse(n, format!("expected `{MAP_HEADER}`")));
    }
    let (n, line) = next("origin")?;
    let origin = parse_keyed::<f64>(n, line, "origin", 3)?;
    let (n, line) = next("dims")?;
    let dims = parse_keyed::<usize>(n, line, "dims", 3)?;
    let (n, line) = next("r_v")?;
    let r_v = parse_keyed::<f64>(n, line, "r_v", 1)?[0];

    let total = dims[0]
        .checked_mul(dims[1])
        .and_then(|v| v.checked_mul(dims[2]))
        .ok_or_else(|| Error::parse(n, "dims overflow"))?;
    let mut cells = Vec::with_capacity(total);
    loop {
        let (n, line) = next("run or `end`")?;
        if line == "end" {
            break;
        }
        let mut it = line.split_whitespace();
        let value = match it.next() {
            Some("0") => false,
            Some("1") => true,
            _ => return Err(Error::parse(n, "run value must be 0 or 1")),
        };
        let len: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(n, "bad run length"))?;
        if it.next().is_some() {
            return Err(Error::parse(n, "trailing tokens after run"));
        }
        if cells.len() + len > total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: cells.len() + len,
            });
        }
        cells.extend(std::iter::repeat(value).take(len));
    }
    if cells.len() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: cells.len(),
        });
    }
    OccupancyMap::from_cells(
        Vec3::new(origin[0], origin[1], origin[2]),
        [dims[0], dims[1], dims[2]],
        r_v,
        cells,
    )
}

fn parse_keyed<T: std::str::FromStr>(line_no: usize, line: &str, key: &str, count: usize) -> Result<Vec<T>> {
    let mut it = line.split_whitespace();
    if it.next() != Some(key) {
        return Err(Error::parse(line_no, format!("expected `{key}`")));
    }
    let values: Vec<T> = it
        .map(|s| s.parse::<T>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(line_no, format!("bad number in `{key}`")))?;
    if values.len() != count {
        return Err(Error::parse(
            line_no,
            format!("`{key}` takes {count} values, got {}", values.len()),
        ));
    }
    Ok(values)
}
