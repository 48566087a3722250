//! Experiment orchestration: pair sampling, hop aggregation, dropout and
//! clustering-exponent sweeps, and degree-distribution analyses.
//!
//! All randomness flows from one master seed through [`derive_seed`], so any
//! report regenerates bit-identically from its echoed config. Routing
//! parallelizes across targets; aggregation folds in run order, keeping
//! floating-point results independent of thread count.

use crate::distance::DistanceOracle;
use crate::models::{construct, ModelParams, SocialNetwork};
use crate::roadnet::{RoadNetwork, VertexId};
use crate::routing::{greedy_route, RouteQuery, RouteResult, RoutingError, RoutingTrace};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::{self, Write};
use std::sync::Arc;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("need at least 2 vertices to sample pairs, got {0}")]
    TooFewVertices(usize),
    #[error("invalid experiment config: {0}")]
    BadConfig(String),
    #[error(transparent)]
    Model(#[from] crate::models::ModelError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Free-form label echoed into report provenance.
    pub dataset: String,
    pub num_pairs: usize,
    /// Dropout grid for [`dropout_sweep`]; the first entry (0 when empty) is
    /// the dropout used by [`run_hop_experiment`].
    pub dropout_ps: Vec<f64>,
    /// Exponent grid for [`sweep_clustering_exponent`].
    pub s_values: Vec<f64>,
    /// Master seed; every sub-seed derives from it.
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.num_pairs == 0 {
            return Err(ExperimentError::BadConfig("num_pairs must be positive".into()));
        }
        for &p in &self.dropout_ps {
            if !(0.0..=1.0).contains(&p) {
                return Err(ExperimentError::BadConfig(format!(
                    "dropout probability {p} outside [0, 1]"
                )));
            }
        }
        for &s in &self.s_values {
            if !s.is_finite() || s < 0.0 {
                return Err(ExperimentError::BadConfig(format!(
                    "clustering exponent {s} must be finite and nonnegative"
                )));
            }
        }
        Ok(())
    }

    pub fn primary_dropout(&self) -> f64 {
        self.dropout_ps.first().copied().unwrap_or(0.0)
    }
}

/// Stable sub-seed derivation: FNV-1a over (master, domain, index) with a
/// splitmix64 finalizer. Platform-independent and fixed for all time; reports
/// regenerate only if this stays put.
pub fn derive_seed(master: u64, domain: &str, index: u64) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |byte: u8| {
        h ^= byte as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    for b in master.to_le_bytes() {
        eat(b);
    }
    for &b in domain.as_bytes() {
        eat(b);
    }
    for b in index.to_le_bytes() {
        eat(b);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

/// Uniform ordered pairs with source != target; pairs may repeat.
pub fn sample_pairs(
    n: usize,
    k: usize,
    rng: &mut impl Rng,
) -> Result<Vec<(VertexId, VertexId)>, ExperimentError> {
    if n < 2 {
        return Err(ExperimentError::TooFewVertices(n));
    }
    let mut pairs = Vec::with_capacity(k);
    for _ in 0..k {
        let s = rng.gen_range(0..n as u32);
        let t = loop {
            let t = rng.gen_range(0..n as u32);
            if t != s {
                break t;
            }
        };
        pairs.push((VertexId(s), VertexId(t)));
    }
    Ok(pairs)
}

fn experiment_pairs(
    n: usize,
    cfg: &ExperimentConfig,
) -> Result<Vec<(VertexId, VertexId)>, ExperimentError> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, "pairs", 0));
    sample_pairs(n, cfg.num_pairs, &mut rng)
}

// Routes every pair, grouped by target so each distance map is computed once.
// Groups run in parallel; results are reassembled in run order.
fn route_all(
    net: &SocialNetwork,
    pairs: &[(VertexId, VertexId)],
    dropout_p: f64,
    master_seed: u64,
    oracle: &dyn DistanceOracle,
) -> Result<Vec<RouteResult>, ExperimentError> {
    let mut by_target: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (run, &(_, t)) in pairs.iter().enumerate() {
        by_target.entry(t).or_default().push(run);
    }
    let groups: Vec<(VertexId, Vec<usize>)> = by_target.into_iter().collect();
    let routed: Vec<Vec<(usize, Result<RouteResult, RoutingError>)>> = groups
        .par_iter()
        .map(|(target, runs)| {
            let map = oracle.distances_from(*target);
            runs.iter()
                .map(|&run| {
                    let q = RouteQuery {
                        source: pairs[run].0,
                        target: *target,
                        dropout_p,
                        seed: derive_seed(master_seed, "route", run as u64),
                    };
                    (run, greedy_route(net, &map, &q))
                })
                .collect()
        })
        .collect();
    let mut out: Vec<Option<RouteResult>> = vec![None; pairs.len()];
    for (run, res) in routed.into_iter().flatten() {
        out[run] = Some(res?);
    }
    Ok(out.into_iter().map(Option::unwrap).collect())
}

/// Hop statistics over one batch of runs. Hop figures cover DELIVERED runs
/// only and are `None` when nothing was delivered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HopSummary {
    pub total_runs: usize,
    pub delivered_count: usize,
    pub delivery_rate: f64,
    pub mean_hops: Option<f64>,
    pub median_hops: Option<f64>,
    pub min_hops: Option<u32>,
    pub max_hops: Option<u32>,
}

pub fn summarize(results: &[RouteResult]) -> HopSummary {
    let total_runs = results.len();
    let mut delivered: Vec<u32> = results
        .iter()
        .filter(|r| r.delivered)
        .map(|r| r.hops)
        .collect();
    delivered.sort_unstable();
    let delivered_count = delivered.len();
    let delivery_rate = if total_runs == 0 {
        0.0
    } else {
        delivered_count as f64 / total_runs as f64
    };
    let (mean, median) = if delivered.is_empty() {
        (None, None)
    } else {
        let sum: u64 = delivered.iter().map(|&h| h as u64).sum();
        let mid = delivered_count / 2;
        let median = if delivered_count % 2 == 1 {
            delivered[mid] as f64
        } else {
            (delivered[mid - 1] as f64 + delivered[mid] as f64) / 2.0
        };
        (Some(sum as f64 / delivered_count as f64), Some(median))
    };
    HopSummary {
        total_runs,
        delivered_count,
        delivery_rate,
        mean_hops: mean,
        median_hops: median,
        min_hops: delivered.first().copied(),
        max_hops: delivered.last().copied(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub source: VertexId,
    pub target: VertexId,
    pub delivered: bool,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportConfig {
    pub dataset: String,
    pub model: String,
    pub m: u32,
    pub s: f64,
    pub cap: Option<u32>,
    pub model_seed: u64,
    pub num_pairs: usize,
    pub primary_dropout: f64,
    pub dropout_ps: Vec<f64>,
    pub s_values: Vec<f64>,
    pub master_seed: u64,
    pub n: usize,
    pub road_edges: usize,
    pub long_range_edges: usize,
}

/// Full provenance-carrying result of [`run_hop_experiment`]. Serializes to
/// the versioned `report v1` JSON document; wall time deliberately stays out
/// so equal seeds give byte-identical files.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema: String,
    pub config: ReportConfig,
    pub summary: HopSummary,
    pub runs: Vec<RunRecord>,
    pub degree_whole: Vec<(usize, u64)>,
    pub degree_visited: Vec<(usize, u64)>,
}

pub const REPORT_SCHEMA: &str = "report v1";

/// Report plus the raw per-run results (which carry the traces).
#[derive(Debug, Clone, PartialEq)]
pub struct HopExperiment {
    pub report: ExperimentReport,
    pub results: Vec<RouteResult>,
    pub pairs: Vec<(VertexId, VertexId)>,
}

pub fn run_hop_experiment(
    net: &SocialNetwork,
    cfg: &ExperimentConfig,
    oracle: &dyn DistanceOracle,
) -> Result<HopExperiment, ExperimentError> {
    cfg.validate()?;
    let n = net.base().vertex_count();
    let pairs = experiment_pairs(n, cfg)?;
    let results = route_all(net, &pairs, cfg.primary_dropout(), cfg.seed, oracle)?;
    let summary = summarize(&results);
    let runs: Vec<RunRecord> = results
        .iter()
        .enumerate()
        .map(|(run_id, r)| RunRecord {
            run_id,
            source: pairs[run_id].0,
            target: pairs[run_id].1,
            delivered: r.delivered,
            hops: r.hops,
        })
        .collect();
    let traces: Vec<RoutingTrace> = results.iter().map(|r| r.trace.clone()).collect();
    let p = net.params();
    let report = ExperimentReport {
        schema: REPORT_SCHEMA.to_string(),
        config: ReportConfig {
            dataset: cfg.dataset.clone(),
            model: p.kind.to_string(),
            m: p.m,
            s: p.s,
            cap: p.cap,
            model_seed: p.seed,
            num_pairs: cfg.num_pairs,
            primary_dropout: cfg.primary_dropout(),
            dropout_ps: cfg.dropout_ps.clone(),
            s_values: cfg.s_values.clone(),
            master_seed: cfg.seed,
            n,
            road_edges: net.base().edge_count(),
            long_range_edges: net.long_range_count(),
        },
        summary,
        runs,
        degree_whole: histogram_pairs(&degree_distribution(net, DegreeScope::Whole)),
        degree_visited: histogram_pairs(&degree_distribution(net, DegreeScope::Visited(&traces))),
    };
    Ok(HopExperiment {
        report,
        results,
        pairs,
    })
}

pub fn report_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub enum DegreeScope<'a> {
    /// Every vertex of the network, once.
    Whole,
    /// Every trace step, once per appearance; a vertex on 50 paths counts 50
    /// times. Routing utilization, not static structure.
    Visited(&'a [RoutingTrace]),
}

/// Exact integer histogram of total degree -> count.
pub fn degree_distribution(net: &SocialNetwork, scope: DegreeScope<'_>) -> BTreeMap<usize, u64> {
    let mut hist: BTreeMap<usize, u64> = BTreeMap::new();
    match scope {
        DegreeScope::Whole => {
            for v in net.base().vertices() {
                *hist.entry(net.total_degree(v)).or_insert(0) += 1;
            }
        }
        DegreeScope::Visited(traces) => {
            for trace in traces {
                for step in &trace.steps {
                    *hist.entry(step.total_degree).or_insert(0) += 1;
                }
            }
        }
    }
    hist
}

fn histogram_pairs(hist: &BTreeMap<usize, u64>) -> Vec<(usize, u64)> {
    hist.iter().map(|(&d, &c)| (d, c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogBin {
    /// Inclusive lower degree bound.
    pub lo: usize,
    /// Exclusive upper degree bound.
    pub hi: usize,
    /// Geometric bin center.
    pub center: f64,
    /// Count divided by bin width.
    pub density: f64,
}

/// Power-of-two binning for log-log tails; degree-0 entries are skipped.
pub fn log_binned(hist: &BTreeMap<usize, u64>) -> Vec<LogBin> {
    let max_degree = match hist.keys().next_back() {
        Some(&d) if d >= 1 => d,
        _ => return Vec::new(),
    };
    let mut bins = Vec::new();
    let mut lo = 1usize;
    while lo <= max_degree {
        let hi = lo * 2;
        let count: u64 = hist.range(lo..hi).map(|(_, &c)| c).sum();
        bins.push(LogBin {
            lo,
            hi,
            center: ((lo * hi) as f64).sqrt(),
            density: count as f64 / (hi - lo) as f64,
        });
        lo = hi;
    }
    bins
}

/// Least-squares slope of log10(density) against log10(center) over the
/// nonempty bins, first bin excluded. Descriptive only; `None` if fewer than
/// two points remain.
pub fn tail_slope(bins: &[LogBin]) -> Option<f64> {
    let points: Vec<(f64, f64)> = bins
        .iter()
        .skip(1)
        .filter(|b| b.density > 0.0)
        .map(|b| (b.center.log10(), b.density.log10()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub mean_hops: Option<f64>,
    pub delivery_rate: f64,
}

/// One full construct-and-route cycle per exponent; base graph, pair list,
/// and routing seeds held fixed, network seed derived per point.
pub fn sweep_clustering_exponent(
    base: &Arc<RoadNetwork>,
    base_params: ModelParams,
    s_values: &[f64],
    cfg: &ExperimentConfig,
    oracle: &dyn DistanceOracle,
) -> Result<Vec<SweepRow>, ExperimentError> {
    cfg.validate()?;
    let pairs = experiment_pairs(base.vertex_count(), cfg)?;
    let dropout = cfg.primary_dropout();
    s_values
        .iter()
        .map(|&s| {
            let params = ModelParams {
                s,
                seed: derive_seed(cfg.seed, "s-net", s.to_bits()),
                ..base_params
            };
            let net = construct(Arc::clone(base), params, oracle)?;
            let results = route_all(&net, &pairs, dropout, cfg.seed, oracle)?;
            let summary = summarize(&results);
            Ok(SweepRow {
                param: s,
                mean_hops: summary.mean_hops,
                delivery_rate: summary.delivery_rate,
            })
        })
        .collect()
}

/// Reuses one fixed pair list and per-run seeds across the whole grid
/// (common random numbers), so delivery rates are monotone by construction,
/// not merely in expectation.
pub fn dropout_sweep(
    net: &SocialNetwork,
    cfg: &ExperimentConfig,
    oracle: &dyn DistanceOracle,
) -> Result<Vec<SweepRow>, ExperimentError> {
    cfg.validate()?;
    let pairs = experiment_pairs(net.base().vertex_count(), cfg)?;
    cfg.dropout_ps
        .iter()
        .map(|&p| {
            let results = route_all(net, &pairs, p, cfg.seed, oracle)?;
            let summary = summarize(&results);
            Ok(SweepRow {
                param: p,
                mean_hops: summary.mean_hops,
                delivery_rate: summary.delivery_rate,
            })
        })
        .collect()
}

pub fn write_hops_csv(report: &ExperimentReport, w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "run_id,source,target,delivered,hops")?;
    for r in &report.runs {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.run_id, r.source, r.target, r.delivered, r.hops
        )?;
    }
    Ok(())
}

pub fn write_degdist_csv(report: &ExperimentReport, w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "degree,count,which")?;
    for &(d, c) in &report.degree_whole {
        writeln!(w, "{d},{c},whole")?;
    }
    for &(d, c) in &report.degree_visited {
        writeln!(w, "{d},{c},visited")?;
    }
    Ok(())
}

pub fn write_sweep_csv(rows: &[SweepRow], w: &mut impl Write) -> io::Result<()> {
    writeln!(w, "param,mean_hops,delivery_rate")?;
    for row in rows {
        match row.mean_hops {
            Some(mean) => writeln!(w, "{},{},{}", row.param, mean, row.delivery_rate)?,
            None => writeln!(w, "{},nan,{}", row.param, row.delivery_rate)?,
        }
    }
    Ok(())
}
