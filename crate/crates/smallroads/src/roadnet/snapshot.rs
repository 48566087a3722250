//! Canonical `roadnet v1` snapshot format.
//!
//! Text edge list: `roadnet v1` magic, `n <n> m <m>` counts, one `e u v w`
//! line per edge with `u < v` in ascending order, then `c id x y` coordinate
//! lines. Floats are written in shortest round-trip form so write -> read ->
//! write is byte-identical.

use super::{RoadNetError, RoadNetwork};
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

pub const ROADNET_MAGIC: &str = "roadnet v1";

pub fn write_snapshot(g: &RoadNetwork, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{ROADNET_MAGIC}")?;
    writeln!(out, "n {} m {}", g.vertex_count(), g.edge_count())?;
    for e in g.edges() {
        writeln!(out, "e {} {} {}", e.u, e.v, e.w)?;
    }
    for (i, (x, y)) in g.coords().iter().enumerate() {
        writeln!(out, "c {i} {x} {y}")?;
    }
    Ok(())
}

pub fn read_snapshot(source: impl BufRead) -> Result<RoadNetwork, RoadNetError> {
    let mut lines = source.lines().enumerate();
    let parse_err = |line: usize, msg: String| RoadNetError::Parse { line, msg };

    let (_, magic) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty snapshot".into()))?;
    let magic = magic?;
    if magic.trim_end() != ROADNET_MAGIC {
        return Err(parse_err(
            1,
            format!("expected `{ROADNET_MAGIC}` header, got `{magic}`"),
        ));
    }

    let (_, counts) = lines
        .next()
        .ok_or_else(|| parse_err(2, "missing count line".into()))?;
    let counts = counts?;
    let fields: Vec<&str> = counts.split_whitespace().collect();
    let (n, m) = match fields.as_slice() {
        ["n", n, "m", m] => (
            n.parse::<usize>()
                .map_err(|_| parse_err(2, "bad vertex count".into()))?,
            m.parse::<usize>()
                .map_err(|_| parse_err(2, "bad edge count".into()))?,
        ),
        _ => return Err(parse_err(2, format!("malformed count line `{counts}`"))),
    };

    let mut collapsed: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let tag = match fields.next() {
            Some(t) => t,
            None => continue,
        };
        macro_rules! next_field {
            ($ty:ty, $what:expr) => {
                fields
                    .next()
                    .and_then(|t| t.parse::<$ty>().ok())
                    .ok_or_else(|| parse_err(lineno, format!("bad {}", $what)))
            };
        }
        match tag {
            "e" => {
                let u = next_field!(u32, "edge endpoint")?;
                let v = next_field!(u32, "edge endpoint")?;
                let w = next_field!(f64, "edge weight")?;
                if u as usize >= n || v as usize >= n {
                    return Err(parse_err(lineno, "edge endpoint out of range".into()));
                }
                if u >= v {
                    return Err(parse_err(lineno, "edges must satisfy u < v".into()));
                }
                if !(w > 0.0) || !w.is_finite() {
                    return Err(parse_err(lineno, format!("non-positive weight {w}")));
                }
                if collapsed.insert((u, v), w).is_some() {
                    return Err(parse_err(lineno, format!("duplicate edge ({u}, {v})")));
                }
            }
            "c" => {
                let id = next_field!(usize, "coordinate id")?;
                let x = next_field!(f64, "x coordinate")?;
                let y = next_field!(f64, "y coordinate")?;
                if id >= n {
                    return Err(parse_err(lineno, "coordinate id out of range".into()));
                }
                if coords[id].replace((x, y)).is_some() {
                    return Err(parse_err(lineno, format!("duplicate coordinate for {id}")));
                }
            }
            other => {
                return Err(parse_err(
                    lineno,
                    format!("unrecognized snapshot line type `{other}`"),
                ))
            }
        }
    }
    if collapsed.len() != m {
        return Err(parse_err(
            0,
            format!("count line declares {m} edges, found {}", collapsed.len()),
        ));
    }
    let coords = coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| parse_err(0, format!("vertex {i} missing coordinates"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RoadNetwork::from_collapsed(coords, collapsed))
}
