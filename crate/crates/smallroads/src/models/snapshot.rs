//! Text snapshot for generated social networks.
//!
//! Layout: magic line, a `params` line echoing the model configuration, an
//! `order` line holding the full insertion order, then one `l u v` line per
//! long-range edge in ascending order with `u < v`. The base road network is
//! not embedded; readers supply it and ids are validated against it.
//! Numbers use shortest round-trip formatting, so write/read/write is
//! byte-identical.

use super::{from_snapshot_parts, ModelKind, ModelParams, SocialNetwork};
use crate::roadnet::{RoadNetwork, VertexId};
use std::io::{self, BufRead, Write};
use std::sync::Arc;

pub const SOCIALNET_MAGIC: &str = "socialnet v1";

#[derive(Debug, thiserror::Error)]
pub enum SocialSnapshotError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn perr(line: usize, msg: impl Into<String>) -> SocialSnapshotError {
    SocialSnapshotError::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn write_snapshot(net: &SocialNetwork, mut w: impl Write) -> io::Result<()> {
    let p = net.params();
    writeln!(w, "{SOCIALNET_MAGIC}")?;
    let cap = match p.cap {
        Some(c) => c.to_string(),
        None => "-".to_string(),
    };
    writeln!(w, "params {} {} {} {} {}", p.kind, p.m, p.s, cap, p.seed)?;
    write!(w, "order")?;
    for v in net.insertion_order() {
        write!(w, " {v}")?;
    }
    writeln!(w)?;
    for &(u, v) in net.long_range() {
        writeln!(w, "l {u} {v}")?;
    }
    Ok(())
}

pub fn read_snapshot(
    base: Arc<RoadNetwork>,
    r: impl BufRead,
) -> Result<SocialNetwork, SocialSnapshotError> {
    let n = base.vertex_count();
    let mut lines = r.lines().enumerate();

    let (_, magic) = lines
        .next()
        .ok_or_else(|| perr(1, "empty snapshot"))
        .and_then(|(i, l)| Ok((i, l?)))?;
    if magic != SOCIALNET_MAGIC {
        return Err(perr(1, format!("expected {SOCIALNET_MAGIC:?} header")));
    }

    let (_, params_line) = lines
        .next()
        .ok_or_else(|| perr(2, "missing params line"))
        .and_then(|(i, l)| Ok((i, l?)))?;
    let fields: Vec<&str> = params_line.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "params" {
        return Err(perr(2, "expected `params <kind> <m> <s> <cap|-> <seed>`"));
    }
    let kind: ModelKind = fields[1].parse().map_err(|e| perr(2, e))?;
    let m: u32 = fields[2]
        .parse()
        .map_err(|_| perr(2, format!("bad m {:?}", fields[2])))?;
    let s: f64 = fields[3]
        .parse()
        .map_err(|_| perr(2, format!("bad s {:?}", fields[3])))?;
    let cap = match fields[4] {
        "-" => None,
        raw => Some(
            raw.parse::<u32>()
                .map_err(|_| perr(2, format!("bad cap {raw:?}")))?,
        ),
    };
    let seed: u64 = fields[5]
        .parse()
        .map_err(|_| perr(2, format!("bad seed {:?}", fields[5])))?;
    let params = ModelParams {
        kind,
        m,
        s,
        cap,
        seed,
    };
    params.validate().map_err(|e| perr(2, e.to_string()))?;

    let (_, order_line) = lines
        .next()
        .ok_or_else(|| perr(3, "missing order line"))
        .and_then(|(i, l)| Ok((i, l?)))?;
    let mut order_fields = order_line.split_whitespace();
    if order_fields.next() != Some("order") {
        return Err(perr(3, "expected `order v0 v1 ...`"));
    }
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for raw in order_fields {
        let id: u32 = raw
            .parse()
            .map_err(|_| perr(3, format!("bad vertex id {raw:?}")))?;
        if id as usize >= n {
            return Err(perr(3, format!("vertex {id} out of range for n={n}")));
        }
        if std::mem::replace(&mut seen[id as usize], true) {
            return Err(perr(3, format!("vertex {id} repeated in order")));
        }
        order.push(VertexId(id));
    }
    if order.len() != n {
        return Err(perr(
            3,
            format!("order lists {} of {n} vertices", order.len()),
        ));
    }

    let mut edges: Vec<(VertexId, VertexId)> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            return Err(perr(lineno, "blank line"));
        }
        if fields[0] != "l" || fields.len() != 3 {
            return Err(perr(lineno, format!("expected `l u v`, got {line:?}")));
        }
        let u: u32 = fields[1]
            .parse()
            .map_err(|_| perr(lineno, format!("bad vertex id {:?}", fields[1])))?;
        let v: u32 = fields[2]
            .parse()
            .map_err(|_| perr(lineno, format!("bad vertex id {:?}", fields[2])))?;
        if u >= v {
            return Err(perr(lineno, format!("edge {u} {v} not in u < v form")));
        }
        if v as usize >= n {
            return Err(perr(lineno, format!("vertex {v} out of range for n={n}")));
        }
        let pair = (VertexId(u), VertexId(v));
        if let Some(last) = edges.last() {
            if *last >= pair {
                return Err(perr(lineno, format!("edge {u} {v} out of ascending order")));
            }
        }
        edges.push(pair);
    }

    Ok(from_snapshot_parts(base, params, edges, order))
}
