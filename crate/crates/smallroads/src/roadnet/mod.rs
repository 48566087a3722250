//! Road-network ingestion and normalization.
//!
//! A [`RoadNetwork`] is the immutable weighted undirected base graph that every
//! other module consumes: model construction samples long-range contacts by
//! road distance, and routing forwards messages toward the contact nearest the
//! target in road distance. Ingestion goes parse -> largest connected
//! component -> weight normalization, after which the minimum edge weight is
//! exactly 1 and vertex ids are dense.

mod dimacs;
mod merge;
mod snapshot;

pub use dimacs::parse_dimacs;
pub use merge::{merge_networks, MergeWarning, MergedNetwork};
pub use snapshot::{read_snapshot, write_snapshot};

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// Dense vertex index in `[0, n)`.
///
/// Ids are contiguous after LCC extraction and re-indexing; files use 1-based
/// ids which the parser shifts down.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Undirected weighted edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum RoadNetError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("empty graph")]
    EmptyGraph,
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("edge ({u}, {v}) references a vertex out of range (n = {n})")]
    VertexOutOfRange { u: u32, v: u32, n: usize },
    #[error("edge ({u}, {v}) has non-positive weight {w}")]
    NonPositiveWeight { u: u32, v: u32, w: f64 },
    #[error("merge requires at least one input network")]
    NoInputs,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Immutable weighted undirected road graph with vertex coordinates.
///
/// Invariants held by construction: no self-loops, parallel edges collapsed to
/// the minimum weight, all weights strictly positive, adjacency symmetric.
/// Coordinates are carried for multi-state stitching only; every distance used
/// by models and routing is a graph distance.
#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    coords: Vec<(f64, f64)>,
    edges: Vec<Edge>,
    adj: Vec<Vec<(VertexId, f64)>>,
}

impl RoadNetwork {
    /// Builds a network from an undirected edge list. Parallel edges collapse
    /// to the minimum weight; self-loops and non-positive weights are errors.
    pub fn from_edges(
        coords: Vec<(f64, f64)>,
        edges: &[(u32, u32, f64)],
    ) -> Result<Self, RoadNetError> {
        let n = coords.len();
        let mut collapsed: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for &(u, v, w) in edges {
            if u == v {
                return Err(RoadNetError::SelfLoop(u));
            }
            if u as usize >= n || v as usize >= n {
                return Err(RoadNetError::VertexOutOfRange { u, v, n });
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(RoadNetError::NonPositiveWeight { u, v, w });
            }
            let key = (u.min(v), u.max(v));
            collapsed
                .entry(key)
                .and_modify(|cur| *cur = cur.min(w))
                .or_insert(w);
        }
        Ok(Self::from_collapsed(coords, collapsed))
    }

    /// Assembles from an already collapsed `(u < v) -> w` map. Internal fast
    /// path; callers guarantee range and positivity.
    pub(crate) fn from_collapsed(
        coords: Vec<(f64, f64)>,
        collapsed: BTreeMap<(u32, u32), f64>,
    ) -> Self {
        let n = coords.len();
        let mut adj = vec![Vec::new(); n];
        let mut edges = Vec::with_capacity(collapsed.len());
        for (&(u, v), &w) in &collapsed {
            edges.push(Edge {
                u: VertexId(u),
                v: VertexId(v),
                w,
            });
            adj[u as usize].push((VertexId(v), w));
            adj[v as usize].push((VertexId(u), w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(v, _)| v);
        }
        RoadNetwork { coords, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.coords.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.coords.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn coord(&self, v: VertexId) -> (f64, f64) {
        self.coords[v.index()]
    }

    /// Road neighbors of `v` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.adj[v.index()]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::min)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).reduce(f64::max)
    }

    /// True when every vertex is reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        if self.coords.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![VertexId(0)];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in self.neighbors(v) {
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.vertex_count()
    }
}

/// Returns the subgraph induced by the largest connected component, vertices
/// re-indexed densely in ascending original-id order. Ties between equal-size
/// components go to the one containing the smallest original id.
pub fn extract_lcc(g: &RoadNetwork) -> Result<RoadNetwork, RoadNetError> {
    let n = g.vertex_count();
    if n == 0 {
        return Err(RoadNetError::EmptyGraph);
    }
    let mut component = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    // Scanning vertices in id order means components are discovered in order
    // of their smallest contained id, so "first largest" is the tie-break.
    for start in 0..n {
        if component[start] != usize::MAX {
            continue;
        }
        let label = sizes.len();
        let mut size = 0usize;
        let mut stack = vec![start];
        component[start] = label;
        while let Some(v) = stack.pop() {
            size += 1;
            for &(u, _) in g.neighbors(VertexId(v as u32)) {
                if component[u.index()] == usize::MAX {
                    component[u.index()] = label;
                    stack.push(u.index());
                }
            }
        }
        sizes.push(size);
    }
    let best = sizes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .map(|(i, _)| i)
        .unwrap();

    let mut remap = vec![u32::MAX; n];
    let mut coords = Vec::with_capacity(sizes[best]);
    for v in 0..n {
        if component[v] == best {
            remap[v] = coords.len() as u32;
            coords.push(g.coords[v]);
        }
    }
    let mut collapsed = BTreeMap::new();
    for e in &g.edges {
        let (u, v) = (remap[e.u.index()], remap[e.v.index()]);
        if u != u32::MAX && v != u32::MAX {
            collapsed.insert((u.min(v), u.max(v)), e.w);
        }
    }
    Ok(RoadNetwork::from_collapsed(coords, collapsed))
}

/// Divides every edge weight by the minimum weight so the smallest weight is
/// exactly 1. Weight ratios are preserved up to rounding.
pub fn normalize_weights(g: &RoadNetwork) -> Result<RoadNetwork, RoadNetError> {
    let min = match g.min_weight() {
        Some(m) => m,
        None => return Ok(g.clone()),
    };
    if min <= 0.0 {
        let e = g.edges.iter().find(|e| e.w <= 0.0).unwrap();
        return Err(RoadNetError::NonPositiveWeight {
            u: e.u.0,
            v: e.v.0,
            w: e.w,
        });
    }
    let collapsed = g
        .edges
        .iter()
        .map(|e| ((e.u.0, e.v.0), e.w / min))
        .collect();
    Ok(RoadNetwork::from_collapsed(g.coords.clone(), collapsed))
}
