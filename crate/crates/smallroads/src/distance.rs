//! Exact shortest-path distances on the road network.
//!
//! Everything downstream (model weights, greedy forwarding, trace metrics)
//! consumes road distances through [`DistanceOracle`], which answers with the
//! full distance map from a source vertex. Maps are computed by Dijkstra's
//! algorithm and may be cached, but an oracle must never approximate.

use crate::roadnet::{RoadNetwork, VertexId};
use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, RwLock};

/// Distances from one source to every vertex, indexed by vertex id.
/// Unreachable vertices hold `f64::INFINITY`; on an LCC there are none.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMap {
    pub source: VertexId,
    pub dist: Vec<f64>,
}

impl DistanceMap {
    pub fn get(&self, v: VertexId) -> f64 {
        self.dist[v.index()]
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    vertex: u32,
}

impl Eq for State {}

// BinaryHeap is a max-heap; reverse on distance for min-first extraction.
// Ties extract the smaller vertex id, keeping settle order deterministic.
impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source` over the undirected weighted road graph.
pub fn sssp(net: &RoadNetwork, source: VertexId) -> DistanceMap {
    let n = net.vertex_count();
    assert!(source.index() < n, "source out of range");
    let mut dist = vec![f64::INFINITY; n];
    dist[source.index()] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(State {
        dist: 0.0,
        vertex: source.0,
    });
    while let Some(State { dist: d, vertex }) = heap.pop() {
        if d > dist[vertex as usize] {
            continue;
        }
        for &(nb, w) in net.neighbors(VertexId(vertex)) {
            let nd = d + w;
            if nd < dist[nb.index()] {
                dist[nb.index()] = nd;
                heap.push(State {
                    dist: nd,
                    vertex: nb.0,
                });
            }
        }
    }
    DistanceMap { source, dist }
}

/// Source of exact road-network distances. Implementations may cache whole
/// maps but must return exactly what [`sssp`] would.
pub trait DistanceOracle: Send + Sync {
    fn distances_from(&self, source: VertexId) -> Arc<DistanceMap>;
    fn road(&self) -> &RoadNetwork;
}

/// Recomputes a fresh map per query.
pub struct DijkstraOracle {
    net: Arc<RoadNetwork>,
}

impl DijkstraOracle {
    pub fn new(net: Arc<RoadNetwork>) -> Self {
        DijkstraOracle { net }
    }
}

impl DistanceOracle for DijkstraOracle {
    fn distances_from(&self, source: VertexId) -> Arc<DistanceMap> {
        Arc::new(sssp(&self.net, source))
    }

    fn road(&self) -> &RoadNetwork {
        &self.net
    }
}

/// Memoizes maps by source. Routing queries grouped by target hit the cache
/// on every step after the first.
pub struct CachedOracle {
    net: Arc<RoadNetwork>,
    cache: RwLock<HashMap<VertexId, Arc<DistanceMap>>>,
}

impl CachedOracle {
    pub fn new(net: Arc<RoadNetwork>) -> Self {
        CachedOracle {
            net,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn cached_sources(&self) -> usize {
        self.cache.read().unwrap().len()
    }
}

impl DistanceOracle for CachedOracle {
    fn distances_from(&self, source: VertexId) -> Arc<DistanceMap> {
        if let Some(map) = self.cache.read().unwrap().get(&source) {
            return Arc::clone(map);
        }
        let map = Arc::new(sssp(&self.net, source));
        self.cache
            .write()
            .unwrap()
            .entry(source)
            .or_insert_with(|| Arc::clone(&map));
        map
    }

    fn road(&self) -> &RoadNetwork {
        &self.net
    }
}

/// Distances of every vertex to `target`. Edges are undirected, so this is
/// the map from `target` read in reverse.
pub fn distances_to_target(oracle: &dyn DistanceOracle, target: VertexId) -> Arc<DistanceMap> {
    oracle.distances_from(target)
}
