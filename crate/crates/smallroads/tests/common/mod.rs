//! Fixtures shared across integration tests.
//!
//! Real TIGER extracts are not shipped with the repository, so the tests run
//! on synthetic street maps instead: jittered grids with a fraction of
//! segments removed. These reproduce what matters for the models (metric
//! edge lengths, mostly degree 3-4, dead ends, a single large component) at
//! the same vertex counts as the states the experiments talk about.

#![allow(dead_code)]

use std::path::Path;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smallroads::roadnet::{extract_lcc, normalize_weights};
use smallroads::RoadNetwork;

/// Jittered rows x cols grid with ~10% of segments deleted, an urban density
/// gradient (short blocks downtown, long segments toward the rim), dead-end
/// stubs pruned, reduced to its largest component and normalized to unit
/// minimum weight.
pub fn grid_town(rows: usize, cols: usize, seed: u64) -> RoadNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (cx, cy) = ((cols - 1) as f64 / 2.0, (rows - 1) as f64 / 2.0);
    let rmax = (cx * cx + cy * cy).sqrt();
    let mut coords = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let x = c as f64 + rng.gen_range(-0.2..0.2) - cx;
            let y = r as f64 + rng.gen_range(-0.2..0.2) - cy;
            // radial compression toward the center, floored so block
            // lengths stay within a factor ~6 of each other; without the
            // floor a couple of innermost vertices end up so close that
            // their mutual sampling weight swamps everything else
            let rad = (x * x + y * y).sqrt().max(1e-9);
            let scale = (rad / rmax).sqrt().max(0.25);
            coords.push((x * scale, y * scale));
        }
    }
    let at = |r: usize, c: usize| (r * cols + c) as u32;
    let mut kept = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let mut link = |u: u32, v: u32, rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.1) {
                    return;
                }
                let (ux, uy) = coords[u as usize];
                let (vx, vy) = coords[v as usize];
                let w = ((ux - vx).powi(2) + (uy - vy).powi(2)).sqrt();
                kept.push((u, v, w));
            };
            if c + 1 < cols {
                link(at(r, c), at(r, c + 1), &mut rng);
            }
            if r + 1 < rows {
                link(at(r, c), at(r + 1, c), &mut rng);
            }
        }
    }
    // prune dead-end chains so the minimum road degree is 2
    let mut deg = vec![0u32; rows * cols];
    for &(u, v, _) in &kept {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    loop {
        let before = kept.len();
        kept.retain(|&(u, v, _)| {
            if deg[u as usize] == 1 || deg[v as usize] == 1 {
                deg[u as usize] -= 1;
                deg[v as usize] -= 1;
                false
            } else {
                true
            }
        });
        if kept.len() == before {
            break;
        }
    }
    let g = RoadNetwork::from_edges(coords, &kept).expect("grid is well formed");
    let g = extract_lcc(&g).expect("grid has a component");
    normalize_weights(&g).expect("grid weights are positive")
}

/// Mid-size rural state: street-grid county seats scattered over a wide
/// disk (one seat at the hub, an inner ring, and a rim ring), joined by
/// long two-lane highways running seat to seat. Two road-survey traits
/// matter here: intersections concentrate in built-up areas, and rural
/// highways are polylines whose junction spacing is far coarser than any
/// downtown block, so the middle distance band around each town holds
/// almost no vertices. That sparse middle band is what pushes hop counts
/// up to realistic levels at this vertex budget.
pub fn highway_state(towns: usize, spread: f64, seed: u64) -> RoadNetwork {
    const TOWN_SIDE: usize = 32;
    const STEP: f64 = 0.5;
    const SEG: f64 = 8.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let hub = (spread + 40.0, spread + 40.0);

    // jittered polar template: one seat at the hub, a third of the rest on
    // the inner ring, the remainder on the rim
    let mut centers: Vec<(f64, f64)> = Vec::new();
    centers.push((hub.0 + rng.gen_range(-30.0..30.0), hub.1 + rng.gen_range(-30.0..30.0)));
    let inner = (towns - 1) / 3;
    let outer = towns - 1 - inner;
    for (count, frac) in [(inner, 0.5), (outer, 1.0)] {
        for k in 0..count {
            let theta = tau * (k as f64 + rng.gen_range(-0.3..0.3)) / count as f64;
            let rad = spread * (frac + rng.gen_range(-0.12..0.12));
            centers.push((hub.0 + rad * theta.cos(), hub.1 + rad * theta.sin()));
        }
    }

    // jittered town grid appended to `coords`/`kept`, radially compressed
    // (same warp as `grid_town`) so downtown blocks run short; 4-neighbors
    // link with 10% attrition
    fn lattice(
        coords: &mut Vec<(f64, f64)>,
        kept: &mut Vec<(u32, u32, f64)>,
        center: (f64, f64),
        side: usize,
        step: f64,
        rng: &mut ChaCha8Rng,
    ) -> u32 {
        let base = coords.len() as u32;
        let mid = (side - 1) as f64 / 2.0;
        let rmax = mid * step * std::f64::consts::SQRT_2;
        for r in 0..side {
            for c in 0..side {
                let x = (c as f64 - mid + rng.gen_range(-0.2..0.2)) * step;
                let y = (r as f64 - mid + rng.gen_range(-0.2..0.2)) * step;
                let rad = x.hypot(y).max(1e-9);
                let scale = (rad / rmax).sqrt().max(0.25);
                coords.push((center.0 + x * scale, center.1 + y * scale));
            }
        }
        for r in 0..side {
            for c in 0..side {
                let u = base + (r * side + c) as u32;
                let mut link = |v: u32, rng: &mut ChaCha8Rng| {
                    if rng.gen_bool(0.1) {
                        return;
                    }
                    let (ux, uy) = coords[u as usize];
                    let (vx, vy) = coords[v as usize];
                    kept.push((u, v, (ux - vx).hypot(uy - vy)));
                };
                if c + 1 < side {
                    link(u + 1, rng);
                }
                if r + 1 < side {
                    link(u + side as u32, rng);
                }
            }
        }
        base
    }

    // straight road from u to v in equal segments of roughly `seg`; the
    // interior vertices are the degree-2 polyline points
    fn chain(
        coords: &mut Vec<(f64, f64)>,
        kept: &mut Vec<(u32, u32, f64)>,
        u: u32,
        v: u32,
        seg: f64,
    ) {
        let (ux, uy) = coords[u as usize];
        let (vx, vy) = coords[v as usize];
        let len = (ux - vx).hypot(uy - vy);
        let pieces = (len / seg).ceil().max(1.0) as usize;
        let mut prev = u;
        for i in 1..pieces {
            let t = i as f64 / pieces as f64;
            let id = coords.len() as u32;
            coords.push((ux + t * (vx - ux), uy + t * (vy - uy)));
            kept.push((prev, id, len / pieces as f64));
            prev = id;
        }
        kept.push((prev, v, len / pieces as f64));
    }

    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut kept: Vec<(u32, u32, f64)> = Vec::new();

    let bases: Vec<u32> = centers
        .iter()
        .map(|&c| lattice(&mut coords, &mut kept, c, TOWN_SIDE, STEP, &mut rng))
        .collect();

    // road plan over a set of sites: a spanning tree plus each site's two
    // nearest neighbors, so most sites sit on a through route
    fn road_plan(pts: &[(f64, f64)]) -> Vec<(usize, usize)> {
        let sep = |i: usize, j: usize| (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
        fn find(comp: &mut [usize], mut x: usize) -> usize {
            while comp[x] != x {
                comp[x] = comp[comp[x]];
                x = comp[x];
            }
            x
        }
        let n = pts.len();
        let mut pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        pairs.sort_by(|a, b| sep(a.0, a.1).total_cmp(&sep(b.0, b.1)));
        let mut comp: Vec<usize> = (0..n).collect();
        let mut plan: Vec<(usize, usize)> = Vec::new();
        for &(i, j) in &pairs {
            let (a, b) = (find(&mut comp, i), find(&mut comp, j));
            if a != b {
                comp[a] = b;
                plan.push((i, j));
            }
        }
        for i in 0..n {
            let mut near: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            near.sort_by(|&a, &b| sep(i, a).total_cmp(&sep(i, b)));
            for &j in near.iter().take(2) {
                let e = (i.min(j), i.max(j));
                if !plan.contains(&e) {
                    plan.push(e);
                }
            }
        }
        plan
    }

    // each road runs between the facing edge midpoints of its two towns
    let side = TOWN_SIDE as u32;
    let mid = side / 2;
    let gate = |from: usize, toward: (f64, f64), coords: &[(f64, f64)]| -> u32 {
        let b = bases[from];
        [b + mid, b + side * mid, b + side * (mid + 1) - 1, b + side * (side - 1) + mid]
            .into_iter()
            .min_by(|&p, &q| {
                let dp = (coords[p as usize].0 - toward.0).hypot(coords[p as usize].1 - toward.1);
                let dq = (coords[q as usize].0 - toward.0).hypot(coords[q as usize].1 - toward.1);
                dp.total_cmp(&dq)
            })
            .expect("towns have four gates")
    };

    for &(i, j) in &road_plan(&centers) {
        let (u, v) = (gate(i, centers[j], &coords), gate(j, centers[i], &coords));
        chain(&mut coords, &mut kept, u, v, SEG);
    }

    // prune dead-end chains so the minimum road degree is 2
    let mut deg = vec![0u32; coords.len()];
    for &(u, v, _) in &kept {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    loop {
        let before = kept.len();
        kept.retain(|&(u, v, _)| {
            if deg[u as usize] == 1 || deg[v as usize] == 1 {
                deg[u as usize] -= 1;
                deg[v as usize] -= 1;
                false
            } else {
                true
            }
        });
        if kept.len() == before {
            break;
        }
    }
    let g = RoadNetwork::from_edges(coords, &kept).expect("mesh is well formed");
    let g = extract_lcc(&g).expect("mesh has a component");
    normalize_weights(&g).expect("mesh weights are positive")
}

static SMALL_STATE: OnceLock<Arc<RoadNetwork>> = OnceLock::new();
static MID_STATE: OnceLock<Arc<RoadNetwork>> = OnceLock::new();
static DENSE_STATE: OnceLock<Arc<RoadNetwork>> = OnceLock::new();

/// Small-state scale, n about 9.5k.
pub fn small_state() -> &'static Arc<RoadNetwork> {
    SMALL_STATE.get_or_init(|| Arc::new(grid_town(98, 98, 11)))
}

/// Mid-state scale, n about 20k, rural texture: scattered towns with long
/// highways between them.
pub fn mid_state() -> &'static Arc<RoadNetwork> {
    MID_STATE.get_or_init(|| Arc::new(highway_state(16, 2600.0, 12)))
}

/// Mid-state scale, n about 19.5k, compactly built up: one continuous
/// street grid, no rural gaps.
pub fn dense_state() -> &'static Arc<RoadNetwork> {
    DENSE_STATE.get_or_init(|| Arc::new(grid_town(140, 140, 31)))
}

/// Writes `g` as a DIMACS .gr/.co pair (1-based ids, both arc directions).
pub fn write_dimacs(g: &RoadNetwork, gr: &Path, co: &Path) {
    let mut out = format!("c synthetic fixture\np sp {} {}\n", g.vertex_count(), 2 * g.edge_count());
    for e in g.edges() {
        out.push_str(&format!("a {} {} {}\n", e.u.0 + 1, e.v.0 + 1, e.w));
        out.push_str(&format!("a {} {} {}\n", e.v.0 + 1, e.u.0 + 1, e.w));
    }
    std::fs::write(gr, out).expect("write .gr");
    let mut out = format!("p aux sp co {}\n", g.vertex_count());
    for (i, (x, y)) in g.coords().iter().enumerate() {
        out.push_str(&format!("v {} {} {}\n", i + 1, x, y));
    }
    std::fs::write(co, out).expect("write .co");
}

/// Sample mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    assert!(xs.len() > 1, "need at least two observations");
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
