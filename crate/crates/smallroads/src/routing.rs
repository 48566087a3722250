//! Decentralized greedy routing over a social network.
//!
//! Each holder forwards the message to the contact (road or long-range)
//! with the smallest road-network distance to the target, breaking ties by
//! smallest vertex id. Remaining distance strictly decreases every hop: the
//! road neighbor on the shortest path to the target is always strictly
//! closer under positive edge weights, so greedy can never get stuck. With
//! dropout, the holder discards the message with probability `dropout_p`
//! before each forwarding decision, the source included.

use crate::distance::DistanceMap;
use crate::models::SocialNetwork;
use crate::roadnet::VertexId;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::{self, Write};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RouteQuery {
    pub source: VertexId,
    pub target: VertexId,
    /// Probability the current holder drops the message instead of
    /// forwarding.
    pub dropout_p: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Delivered,
    Dropped,
}

/// One forwarding decision point: the holder, its road distance to the
/// target, and its contact count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub vertex: VertexId,
    pub remaining: f64,
    pub total_degree: usize,
}

/// Holders the message reached, in order. A delivered trace ends at the
/// penultimate vertex (the target itself is not a step); a dropped trace
/// ends at the holder that dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutingTrace {
    pub steps: Vec<TraceStep>,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouteResult {
    pub delivered: bool,
    /// Forwarding events performed; equals `steps.len()` when delivered.
    pub hops: u32,
    pub trace: RoutingTrace,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RoutingError {
    #[error(
        "no strictly closer contact at vertex {vertex} (remaining {remaining}); \
         the road network violates positive-weight connectivity"
    )]
    NoProgress { vertex: VertexId, remaining: f64 },
}

/// Routes one message greedily. `target_map` must hold distances from
/// `q.target`.
pub fn greedy_route(
    net: &SocialNetwork,
    target_map: &DistanceMap,
    q: &RouteQuery,
) -> Result<RouteResult, RoutingError> {
    assert_eq!(target_map.source, q.target, "map must be rooted at the target");
    let n = net.base().vertex_count();
    assert!(q.source.index() < n && q.target.index() < n, "query out of range");
    assert!(
        (0.0..=1.0).contains(&q.dropout_p),
        "dropout probability out of range"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    let mut current = q.source;
    let mut steps = Vec::new();
    let mut hops = 0u32;
    loop {
        if current == q.target {
            return Ok(RouteResult {
                delivered: true,
                hops,
                trace: RoutingTrace {
                    steps,
                    outcome: Outcome::Delivered,
                },
            });
        }
        let remaining = target_map.get(current);
        steps.push(TraceStep {
            vertex: current,
            remaining,
            total_degree: net.total_degree(current),
        });
        if q.dropout_p > 0.0 && rng.gen_bool(q.dropout_p) {
            return Ok(RouteResult {
                delivered: false,
                hops,
                trace: RoutingTrace {
                    steps,
                    outcome: Outcome::Dropped,
                },
            });
        }
        let next = closest_contact(net, target_map, current);
        if target_map.get(next) >= remaining {
            return Err(RoutingError::NoProgress {
                vertex: current,
                remaining,
            });
        }
        current = next;
        hops += 1;
    }
}

// Scans road neighbors and long-range neighbors as one contact set; both
// lists are ascending, so on equal distance the earlier (smaller) id sticks.
fn closest_contact(net: &SocialNetwork, target_map: &DistanceMap, v: VertexId) -> VertexId {
    let mut best: Option<(f64, VertexId)> = None;
    let mut consider = |u: VertexId| {
        let d = target_map.get(u);
        match best {
            Some((bd, bu)) if (d, u) >= (bd, bu) => {}
            _ => best = Some((d, u)),
        }
    };
    for &(u, _) in net.base().neighbors(v) {
        consider(u);
    }
    for &u in net.lr_neighbors(v) {
        consider(u);
    }
    best.expect("every vertex in a connected road network has a neighbor").1
}

/// Appends traces to `w` in long CSV form, one row per step, keyed by
/// `run_id`. Writes the header when `with_header` is set.
pub fn write_trace_csv(
    w: &mut impl Write,
    runs: &[(usize, &RoutingTrace)],
    with_header: bool,
) -> io::Result<()> {
    if with_header {
        writeln!(w, "run_id,step,vertex,remaining,total_degree")?;
    }
    for (run_id, trace) in runs {
        for (i, step) in trace.steps.iter().enumerate() {
            writeln!(
                w,
                "{run_id},{i},{},{},{}",
                step.vertex, step.remaining, step.total_degree
            )?;
        }
    }
    Ok(())
}
