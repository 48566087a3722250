//! 9th DIMACS Implementation Challenge road-network format.
//!
//! `.gr` files carry `c` comments, one `p sp <n> <m>` header and `a <u> <v> <w>`
//! arc lines; `.co` files carry `v <id> <x> <y>` coordinate lines (an optional
//! `p aux sp co <n>` header is accepted). Ids are 1-based in the files.

use super::{RoadNetError, RoadNetwork};
use std::collections::BTreeMap;
use std::io::BufRead;

fn parse_err(line: usize, msg: impl Into<String>) -> RoadNetError {
    RoadNetError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses a `.gr`/`.co` stream pair into a road network with 0-based ids.
///
/// Arcs are directed in the file; because all edges are treated as undirected,
/// a symmetric arc pair collapses into one edge and an arc whose reverse is
/// absent still yields an undirected edge. Parallel arcs keep the minimum
/// weight. Self-loop arcs are dropped.
pub fn parse_dimacs(
    gr_source: impl BufRead,
    co_source: impl BufRead,
) -> Result<RoadNetwork, RoadNetError> {
    let (n, collapsed) = parse_gr(gr_source)?;
    let coords = parse_co(co_source, n)?;
    Ok(RoadNetwork::from_collapsed(coords, collapsed))
}

fn parse_gr(
    source: impl BufRead,
) -> Result<(usize, BTreeMap<(u32, u32), f64>), RoadNetError> {
    let mut header: Option<(usize, usize)> = None;
    let mut arcs_seen = 0usize;
    let mut collapsed: BTreeMap<(u32, u32), f64> = BTreeMap::new();

    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let tag = match fields.next() {
            Some(t) => t,
            None => continue,
        };
        match tag {
            "c" => continue,
            "p" => {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate problem line"));
                }
                let kind = fields.next();
                if kind != Some("sp") {
                    return Err(parse_err(
                        lineno,
                        format!("malformed header: expected `p sp <n> <m>`, got `{line}`"),
                    ));
                }
                let n: usize = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "malformed header: bad vertex count"))?;
                let m: usize = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "malformed header: bad arc count"))?;
                header = Some((n, m));
            }
            "a" => {
                let (n, _) = header
                    .ok_or_else(|| parse_err(lineno, "arc line before `p sp` header"))?;
                let u: u64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad arc tail"))?;
                let v: u64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad arc head"))?;
                let w: f64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad arc weight"))?;
                if u == 0 || u as usize > n || v == 0 || v as usize > n {
                    return Err(parse_err(
                        lineno,
                        format!("arc ({u}, {v}) references a vertex outside 1..={n}"),
                    ));
                }
                if !(w > 0.0) || !w.is_finite() {
                    return Err(parse_err(lineno, format!("non-positive arc weight {w}")));
                }
                arcs_seen += 1;
                if u == v {
                    continue;
                }
                let (a, b) = ((u - 1) as u32, (v - 1) as u32);
                let key = (a.min(b), a.max(b));
                collapsed
                    .entry(key)
                    .and_modify(|cur| *cur = cur.min(w))
                    .or_insert(w);
            }
            other => {
                return Err(parse_err(
                    lineno,
                    format!("unrecognized line type `{other}` in .gr input"),
                ))
            }
        }
    }

    let (n, m) = header.ok_or_else(|| parse_err(0, "missing `p sp <n> <m>` header"))?;
    if arcs_seen != m {
        return Err(parse_err(
            0,
            format!("header declares {m} arcs but {arcs_seen} were found"),
        ));
    }
    Ok((n, collapsed))
}

fn parse_co(source: impl BufRead, n: usize) -> Result<Vec<(f64, f64)>, RoadNetError> {
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
    for (idx, line) in source.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let mut fields = line.split_whitespace();
        let tag = match fields.next() {
            Some(t) => t,
            None => continue,
        };
        match tag {
            "c" => continue,
            "p" => {
                // `p aux sp co <n>` in the challenge files.
                let rest: Vec<&str> = fields.collect();
                if let Some(decl) = rest.last().and_then(|t| t.parse::<usize>().ok()) {
                    if decl != n {
                        return Err(parse_err(
                            lineno,
                            format!(".co header declares {decl} vertices, .gr declares {n}"),
                        ));
                    }
                } else {
                    return Err(parse_err(lineno, "malformed .co header"));
                }
            }
            "v" => {
                let id: u64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad coordinate vertex id"))?;
                let x: f64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad x coordinate"))?;
                let y: f64 = fields
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| parse_err(lineno, "bad y coordinate"))?;
                if id == 0 || id as usize > n {
                    return Err(parse_err(
                        lineno,
                        format!("coordinate for vertex {id} outside 1..={n}"),
                    ));
                }
                let slot = &mut coords[(id - 1) as usize];
                if slot.is_some() {
                    return Err(parse_err(lineno, format!("duplicate coordinate for vertex {id}")));
                }
                *slot = Some((x, y));
            }
            other => {
                return Err(parse_err(
                    lineno,
                    format!("unrecognized line type `{other}` in .co input"),
                ))
            }
        }
    }
    coords
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            c.ok_or_else(|| parse_err(0, format!("vertex {} missing coordinates", i + 1)))
        })
        .collect()
}
