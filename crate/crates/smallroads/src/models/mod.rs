//! Long-range contact models over a road network.
//!
//! All four models add `m` long-range links per vertex by weighted sampling
//! and differ only in the weight rule:
//!
//! * KL: `1 / d(v,u)^s`, inverse road distance, processed in ascending id
//!   order with no seeding.
//! * BA: `added_degree[u]`, preferential attachment seeded by a clique of
//!   `m + 1` uniformly chosen vertices, processed in random order.
//! * NPA: `added_degree[u] / d(v,u)^s`, same seeding and order as BA.
//! * NPA-cap: NPA with weight forced to 0 once `added_degree[u] >= cap`.
//!
//! Degrees count long-range edges only; road edges come back as the local
//! contact tier of the finished [`SocialNetwork`]. Weights for a vertex are
//! computed once, before any of its draws, and the draws are independent, so
//! duplicates collapse and a vertex may gain fewer than `m` distinct links.

mod snapshot;

pub use snapshot::{read_snapshot, write_snapshot, SocialSnapshotError, SOCIALNET_MAGIC};

use crate::distance::{DistanceMap, DistanceOracle};
use crate::roadnet::{RoadNetwork, VertexId};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Kl,
    Ba,
    Npa,
    NpaCap,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Kl => "kl",
            ModelKind::Ba => "ba",
            ModelKind::Npa => "npa",
            ModelKind::NpaCap => "npa-cap",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "kl" => Ok(ModelKind::Kl),
            "ba" => Ok(ModelKind::Ba),
            "npa" => Ok(ModelKind::Npa),
            "npa-cap" => Ok(ModelKind::NpaCap),
            other => Err(format!("unknown model kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Long-range links drawn per vertex.
    pub m: u32,
    /// Clustering exponent; ignored by BA (treated as 0).
    pub s: f64,
    /// Degree cap, NPA-cap only.
    pub cap: Option<u32>,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ModelError {
    #[error("m must be at least 1")]
    ZeroM,
    #[error("clustering exponent must be finite and nonnegative, got {0}")]
    BadExponent(f64),
    #[error("cap {cap} must exceed m {m}")]
    BadCap { cap: u32, m: u32 },
    #[error("cap is only meaningful for the npa-cap model")]
    UnexpectedCap,
    #[error("the npa-cap model requires a cap")]
    MissingCap,
    #[error("model needs at least {need} vertices, road network has {n}")]
    TooFewVertices { n: usize, need: usize },
    #[error("total weight is zero; no eligible candidate")]
    ZeroTotalWeight,
    #[error("no eligible candidate while processing vertex {0}: every weight is 0")]
    NoEligibleCandidates(VertexId),
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.m == 0 {
            return Err(ModelError::ZeroM);
        }
        if !self.s.is_finite() || self.s < 0.0 {
            return Err(ModelError::BadExponent(self.s));
        }
        match (self.kind, self.cap) {
            (ModelKind::NpaCap, None) => return Err(ModelError::MissingCap),
            (ModelKind::NpaCap, Some(cap)) if cap <= self.m => {
                return Err(ModelError::BadCap { cap, m: self.m })
            }
            (ModelKind::NpaCap, Some(_)) => {}
            (_, Some(_)) => return Err(ModelError::UnexpectedCap),
            (_, None) => {}
        }
        Ok(())
    }
}

/// Sampling weights for one vertex's draws, indexed by candidate id.
/// `z` is the normalizing factor, the sum of all weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub z: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Self {
        let z = weights.iter().sum();
        WeightVector { weights, z }
    }
}

/// KL rule: `1 / d(v,u)^s` for every `u != v`.
pub fn kl_weights(map: &DistanceMap, v: VertexId, s: f64) -> WeightVector {
    let mut weights: Vec<f64> = map.dist.iter().map(|d| 1.0 / d.powf(s)).collect();
    weights[v.index()] = 0.0;
    WeightVector::new(weights)
}

/// BA rule: `added_degree[u]` for every `u != v`.
pub fn ba_weights(added_degree: &[u32], v: VertexId) -> WeightVector {
    let mut weights: Vec<f64> = added_degree.iter().map(|&d| d as f64).collect();
    weights[v.index()] = 0.0;
    WeightVector::new(weights)
}

/// NPA rule: `added_degree[u] / d(v,u)^s`; with a cap, any `u` at or above it
/// weighs 0.
pub fn npa_weights(
    map: &DistanceMap,
    added_degree: &[u32],
    v: VertexId,
    s: f64,
    cap: Option<u32>,
) -> WeightVector {
    let mut weights: Vec<f64> = added_degree
        .iter()
        .zip(&map.dist)
        .map(|(&deg, d)| match cap {
            Some(c) if deg >= c => 0.0,
            _ => deg as f64 / d.powf(s),
        })
        .collect();
    weights[v.index()] = 0.0;
    WeightVector::new(weights)
}

/// Performs exactly `m` independent categorical draws over `weights` and
/// returns the set of drawn vertices. Weights are not updated between draws,
/// so duplicates collapse.
pub fn sample_m(
    weights: &WeightVector,
    m: u32,
    rng: &mut impl rand::Rng,
) -> Result<BTreeSet<VertexId>, ModelError> {
    if !(weights.z > 0.0) {
        return Err(ModelError::ZeroTotalWeight);
    }
    let index = WeightedIndex::new(&weights.weights).map_err(|_| ModelError::ZeroTotalWeight)?;
    let mut drawn = BTreeSet::new();
    for _ in 0..m {
        drawn.insert(VertexId(index.sample(rng) as u32));
    }
    Ok(drawn)
}

/// Road network plus one generated tier of long-range edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SocialNetwork {
    base: Arc<RoadNetwork>,
    params: ModelParams,
    long_range: Vec<(VertexId, VertexId)>,
    lr_adj: Vec<Vec<VertexId>>,
    added_degree: Vec<u32>,
    insertion_order: Vec<VertexId>,
}

impl SocialNetwork {
    fn assemble(
        base: Arc<RoadNetwork>,
        params: ModelParams,
        long_range: Vec<(VertexId, VertexId)>,
        insertion_order: Vec<VertexId>,
    ) -> Self {
        let n = base.vertex_count();
        let mut lr_adj = vec![Vec::new(); n];
        let mut added_degree = vec![0u32; n];
        for &(u, v) in &long_range {
            lr_adj[u.index()].push(v);
            lr_adj[v.index()].push(u);
            added_degree[u.index()] += 1;
            added_degree[v.index()] += 1;
        }
        for adj in &mut lr_adj {
            adj.sort_unstable();
        }
        SocialNetwork {
            base,
            params,
            long_range,
            lr_adj,
            added_degree,
            insertion_order,
        }
    }

    pub fn base(&self) -> &RoadNetwork {
        &self.base
    }

    pub fn base_arc(&self) -> &Arc<RoadNetwork> {
        &self.base
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Long-range edges as ascending `(u, v)` pairs with `u < v`.
    pub fn long_range(&self) -> &[(VertexId, VertexId)] {
        &self.long_range
    }

    pub fn long_range_count(&self) -> usize {
        self.long_range.len()
    }

    pub fn lr_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.lr_adj[v.index()]
    }

    /// Incident long-range edge count; road edges are not included.
    pub fn added_degree(&self, v: VertexId) -> u32 {
        self.added_degree[v.index()]
    }

    pub fn added_degrees(&self) -> &[u32] {
        &self.added_degree
    }

    pub fn max_added_degree(&self) -> u32 {
        self.added_degree.iter().copied().max().unwrap_or(0)
    }

    /// Processing order used during construction; for seeded models the first
    /// `m + 1` entries are the seed clique.
    pub fn insertion_order(&self) -> &[VertexId] {
        &self.insertion_order
    }

    /// Union of road neighbors and long-range neighbors, ascending, deduped.
    pub fn contacts(&self, v: VertexId) -> Vec<VertexId> {
        let road = self.base.neighbors(v);
        let lr = &self.lr_adj[v.index()];
        let mut out = Vec::with_capacity(road.len() + lr.len());
        let (mut i, mut j) = (0, 0);
        while i < road.len() || j < lr.len() {
            out.push(match (road.get(i), lr.get(j)) {
                (Some(&(r, _)), Some(&l)) if r == l => {
                    i += 1;
                    j += 1;
                    r
                }
                (Some(&(r, _)), Some(&l)) if r < l => {
                    i += 1;
                    r
                }
                (_, Some(&l)) => {
                    j += 1;
                    l
                }
                (Some(&(r, _)), None) => {
                    i += 1;
                    r
                }
                (None, None) => unreachable!(),
            });
        }
        out
    }

    /// Distinct contact count (a long-range edge duplicating a road edge
    /// counts once).
    pub fn total_degree(&self, v: VertexId) -> usize {
        self.contacts(v).len()
    }

    pub fn max_total_degree(&self) -> usize {
        self.base
            .vertices()
            .map(|v| self.total_degree(v))
            .max()
            .unwrap_or(0)
    }
}

pub fn construct_kl(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    oracle: &dyn DistanceOracle,
) -> Result<SocialNetwork, ModelError> {
    assert_eq!(params.kind, ModelKind::Kl);
    build(base, params, Some(oracle))
}

pub fn construct_ba(base: Arc<RoadNetwork>, params: ModelParams) -> Result<SocialNetwork, ModelError> {
    assert_eq!(params.kind, ModelKind::Ba);
    build(base, params, None)
}

pub fn construct_npa(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    oracle: &dyn DistanceOracle,
) -> Result<SocialNetwork, ModelError> {
    assert_eq!(params.kind, ModelKind::Npa);
    build(base, params, Some(oracle))
}

pub fn construct_npa_cap(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    oracle: &dyn DistanceOracle,
) -> Result<SocialNetwork, ModelError> {
    assert_eq!(params.kind, ModelKind::NpaCap);
    build(base, params, Some(oracle))
}

/// Dispatches on `params.kind`. BA ignores the oracle; the other kinds
/// require one.
pub fn construct(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    oracle: &dyn DistanceOracle,
) -> Result<SocialNetwork, ModelError> {
    match params.kind {
        ModelKind::Ba => construct_ba(base, params),
        _ => build(base, params, Some(oracle)),
    }
}

fn link(set: &mut BTreeSet<(u32, u32)>, a: VertexId, b: VertexId) -> bool {
    debug_assert_ne!(a, b);
    set.insert((a.0.min(b.0), a.0.max(b.0)))
}

// Distance maps are prefetched in parallel this many vertices ahead of the
// sequential draw loop; bounds memory to BATCH maps.
const BATCH: usize = 128;

fn build(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    oracle: Option<&dyn DistanceOracle>,
) -> Result<SocialNetwork, ModelError> {
    params.validate()?;
    let n = base.vertex_count();
    let m = params.m as usize;
    let seeded = params.kind != ModelKind::Kl;
    let need = if seeded { m + 2 } else { 2 };
    if n < need {
        return Err(ModelError::TooFewVertices { n, need });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut order: Vec<VertexId> = base.vertices().collect();
    if seeded {
        order.shuffle(&mut rng);
    }

    let mut long_range: BTreeSet<(u32, u32)> = BTreeSet::new();
    let mut added = vec![0u32; n];
    let start = if seeded {
        for i in 0..=m {
            for j in (i + 1)..=m {
                if link(&mut long_range, order[i], order[j]) {
                    added[order[i].index()] += 1;
                    added[order[j].index()] += 1;
                }
            }
        }
        m + 1
    } else {
        0
    };

    let needs_distance = params.kind != ModelKind::Ba;
    for chunk in order[start..].chunks(BATCH) {
        // Whole-chunk prefetch: a vertex's distance map is independent of the
        // construction state, so maps may be computed in parallel while the
        // draws stay strictly sequential in insertion order.
        let maps: Vec<Option<Arc<DistanceMap>>> = if needs_distance {
            let oracle = oracle.expect("distance-based model requires an oracle");
            use rayon::prelude::*;
            chunk
                .par_iter()
                .map(|&v| Some(oracle.distances_from(v)))
                .collect()
        } else {
            vec![None; chunk.len()]
        };
        for (&v, map) in chunk.iter().zip(maps) {
            let weights = match params.kind {
                ModelKind::Kl => kl_weights(map.as_deref().unwrap(), v, params.s),
                ModelKind::Ba => ba_weights(&added, v),
                ModelKind::Npa => npa_weights(map.as_deref().unwrap(), &added, v, params.s, None),
                ModelKind::NpaCap => {
                    npa_weights(map.as_deref().unwrap(), &added, v, params.s, params.cap)
                }
            };
            let picks = sample_m(&weights, params.m, &mut rng).map_err(|e| match e {
                ModelError::ZeroTotalWeight => ModelError::NoEligibleCandidates(v),
                other => other,
            })?;
            for u in picks {
                if link(&mut long_range, v, u) {
                    added[v.index()] += 1;
                    added[u.index()] += 1;
                }
            }
        }
    }

    let edges: Vec<(VertexId, VertexId)> = long_range
        .into_iter()
        .map(|(u, v)| (VertexId(u), VertexId(v)))
        .collect();
    Ok(SocialNetwork::assemble(base, params, edges, order))
}

// Used by the snapshot reader; edges must be ascending with u < v and the
// order must be a permutation, both validated by the caller.
pub(crate) fn from_snapshot_parts(
    base: Arc<RoadNetwork>,
    params: ModelParams,
    long_range: Vec<(VertexId, VertexId)>,
    insertion_order: Vec<VertexId>,
) -> SocialNetwork {
    SocialNetwork::assemble(base, params, long_range, insertion_order)
}
