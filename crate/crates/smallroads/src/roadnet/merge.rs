//! Stitching several state road networks into one graph.
//!
//! The inputs are disjointly unioned, then every pair of vertices from
//! different inputs whose coordinates lie within `stitch_radius` of each other
//! (Euclidean, in the shared reference frame) is unified into one vertex. The
//! result is passed through LCC extraction and weight normalization.

use super::{extract_lcc, normalize_weights, RoadNetError, RoadNetwork};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MergeWarning {
    /// Stitching unified both endpoints of an edge; those edges were dropped.
    SelfLoopsDropped { count: usize },
    /// The largest connected component covers less than half the unioned
    /// vertices, or a multi-input merge dropped vertices without growing past
    /// its largest input; either way the inputs did not usefully join.
    PoorStitch { lcc_size: usize, union_size: usize },
}

impl fmt::Display for MergeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MergeWarning::SelfLoopsDropped { count } => {
                write!(f, "stitching produced {count} self-loop(s); dropped")
            }
            MergeWarning::PoorStitch {
                lcc_size,
                union_size,
            } => write!(
                f,
                "largest connected component has {lcc_size} of {union_size} vertices; \
                 inputs may not be stitched together"
            ),
        }
    }
}

#[derive(Debug)]
pub struct MergedNetwork {
    pub net: RoadNetwork,
    pub warnings: Vec<MergeWarning>,
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = x;
        while self.parent[cur as usize] != root {
            let next = self.parent[cur as usize];
            self.parent[cur as usize] = root;
            cur = next;
        }
        root
    }

    // Smaller id wins so the representative is deterministic.
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }
}

/// Merges road networks by coordinate coincidence, then extracts the LCC and
/// normalizes weights. Warnings signal dropped self-loops and poor stitches.
pub fn merge_networks(
    gs: &[RoadNetwork],
    stitch_radius: f64,
) -> Result<MergedNetwork, RoadNetError> {
    if gs.is_empty() {
        return Err(RoadNetError::NoInputs);
    }

    let total: usize = gs.iter().map(|g| g.vertex_count()).sum();
    let mut offsets = Vec::with_capacity(gs.len());
    let mut coords = Vec::with_capacity(total);
    let mut origin = Vec::with_capacity(total);
    for (i, g) in gs.iter().enumerate() {
        offsets.push(coords.len() as u32);
        coords.extend_from_slice(g.coords());
        origin.extend(std::iter::repeat(i).take(g.vertex_count()));
    }

    let mut uf = UnionFind::new(total);
    // Bucket vertices on a grid with cell size >= radius; candidates for
    // unification can only sit in the 3x3 neighborhood of a cell. Radius 0
    // degenerates to exact coordinate equality.
    let cell = if stitch_radius > 0.0 { stitch_radius } else { 1.0 };
    let key_of = |x: f64, y: f64| -> (i64, i64) {
        ((x / cell).floor() as i64, (y / cell).floor() as i64)
    };
    let mut buckets: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for (i, &(x, y)) in coords.iter().enumerate() {
        buckets.entry(key_of(x, y)).or_default().push(i as u32);
    }
    for (i, &(x, y)) in coords.iter().enumerate() {
        let (cx, cy) = key_of(x, y);
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(cands) = buckets.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &j in cands {
                    if j as usize <= i || origin[j as usize] == origin[i] {
                        continue;
                    }
                    let (jx, jy) = coords[j as usize];
                    let d2 = (x - jx) * (x - jx) + (y - jy) * (y - jy);
                    if d2 <= stitch_radius * stitch_radius {
                        uf.union(i as u32, j as u32);
                    }
                }
            }
        }
    }

    // Compact representatives to dense ids, keeping ascending order.
    let mut remap: Vec<u32> = vec![u32::MAX; total];
    let mut merged_coords = Vec::new();
    for i in 0..total {
        if uf.find(i as u32) == i as u32 {
            remap[i] = merged_coords.len() as u32;
            merged_coords.push(coords[i]);
        }
    }
    let mut collapsed: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    let mut self_loops = 0usize;
    for (i, g) in gs.iter().enumerate() {
        let off = offsets[i];
        for e in g.edges() {
            let u = remap[uf.find(off + e.u.0) as usize];
            let v = remap[uf.find(off + e.v.0) as usize];
            if u == v {
                self_loops += 1;
                continue;
            }
            let key = (u.min(v), u.max(v));
            collapsed
                .entry(key)
                .and_modify(|cur| *cur = cur.min(e.w))
                .or_insert(e.w);
        }
    }

    let mut warnings = Vec::new();
    if self_loops > 0 {
        warnings.push(MergeWarning::SelfLoopsDropped { count: self_loops });
    }

    let union_size = merged_coords.len();
    let largest_input = gs.iter().map(|g| g.vertex_count()).max().unwrap();
    let unioned = RoadNetwork::from_collapsed(merged_coords, collapsed);
    let lcc = extract_lcc(&unioned)?;
    let lcc_size = lcc.vertex_count();
    // Two signals of a failed stitch: severe vertex loss, or (for multiple
    // inputs) a lossy merge whose LCC never outgrew the largest input.
    let severe = lcc_size * 2 < union_size;
    let no_join = gs.len() > 1 && lcc_size < union_size && lcc_size <= largest_input;
    if severe || no_join {
        warnings.push(MergeWarning::PoorStitch {
            lcc_size,
            union_size,
        });
    }
    let net = normalize_weights(&lcc)?;
    Ok(MergedNetwork { net, warnings })
}
