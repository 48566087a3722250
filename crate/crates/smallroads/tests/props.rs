//! Randomized invariants over the graph, model, and routing layers.

mod common;

use proptest::prelude::*;
use smallroads::distance::{sssp, DijkstraOracle};
use smallroads::models::{self, construct, ModelKind, ModelParams, SocialNetwork};
use smallroads::roadnet::{
    extract_lcc, normalize_weights, read_snapshot, write_snapshot, RoadNetwork, VertexId,
};
use smallroads::routing::{greedy_route, RouteQuery};
use std::collections::VecDeque;
use std::sync::Arc;

/// Random connected graph: spanning tree plus extra edges, integer weights
/// so distance sums are exact in f64.
fn connected_graph(max_n: usize) -> impl Strategy<Value = RoadNetwork> {
    sized_connected_graph(2, max_n)
}

fn sized_connected_graph(min_n: usize, max_n: usize) -> impl Strategy<Value = RoadNetwork> {
    (min_n..max_n)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((any::<usize>(), 1u8..=16), n - 1),
                prop::collection::vec((any::<usize>(), any::<usize>(), 1u8..=16), 0..2 * n),
            )
        })
        .prop_map(|(n, parents, extras)| {
            let mut edges = Vec::new();
            for (i, &(pick, w)) in parents.iter().enumerate() {
                let v = i + 1;
                edges.push(((pick % v) as u32, v as u32, w as f64));
            }
            for &(a, b, w) in &extras {
                let (u, v) = (a % n, b % n);
                if u != v {
                    edges.push((u as u32, v as u32, w as f64));
                }
            }
            let coords = (0..n)
                .map(|i| (i as f64 * 0.5, (i * i % 13) as f64))
                .collect();
            RoadNetwork::from_edges(coords, &edges).expect("generator output is valid")
        })
}

fn model_params() -> impl Strategy<Value = ModelParams> {
    (0usize..4, 1u32..=3, prop_oneof![Just(1.0f64), Just(2.0)], 0u32..4, any::<u16>()).prop_map(
        |(kind_pick, m, s, cap_extra, seed)| {
            let kind = [ModelKind::Kl, ModelKind::Ba, ModelKind::Npa, ModelKind::NpaCap]
                [kind_pick];
            let cap = (kind == ModelKind::NpaCap).then(|| m + 1 + cap_extra);
            ModelParams { kind, m, s, cap, seed: seed as u64 }
        },
    )
}

fn bellman_ford(g: &RoadNetwork, source: VertexId) -> Vec<f64> {
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    dist[source.index()] = 0.0;
    loop {
        let mut changed = false;
        for e in g.edges() {
            let (u, v) = (e.u.index(), e.v.index());
            if dist[u] + e.w < dist[v] {
                dist[v] = dist[u] + e.w;
                changed = true;
            }
            if dist[v] + e.w < dist[u] {
                dist[u] = dist[v] + e.w;
                changed = true;
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Unweighted shortest hop count over road plus long-range contacts.
fn bfs_contact_hops(net: &SocialNetwork, source: VertexId, target: VertexId) -> u32 {
    let n = net.base().vertex_count();
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([(source, 0u32)]);
    seen[source.index()] = true;
    while let Some((v, d)) = queue.pop_front() {
        if v == target {
            return d;
        }
        for c in net.contacts(v) {
            if !seen[c.index()] {
                seen[c.index()] = true;
                queue.push_back((c, d + 1));
            }
        }
    }
    panic!("contact graph is connected by construction");
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn road_snapshots_round_trip(g in connected_graph(48)) {
        let mut buf = Vec::new();
        write_snapshot(&g, &mut buf).unwrap();
        let back = read_snapshot(buf.as_slice()).unwrap();
        prop_assert_eq!(g, back);
    }

    #[test]
    fn normalizing_pins_the_minimum_and_keeps_ratios(g in connected_graph(48)) {
        let min = g.min_weight().unwrap();
        let normed = normalize_weights(&g).unwrap();
        prop_assert_eq!(normed.min_weight(), Some(1.0));
        prop_assert_eq!(normed.vertex_count(), g.vertex_count());
        prop_assert_eq!(normed.coords(), g.coords());
        for (a, b) in g.edges().iter().zip(normed.edges()) {
            prop_assert_eq!((a.u, a.v), (b.u, b.v));
            prop_assert!((b.w * min - a.w).abs() <= 1e-12 * a.w);
        }
    }

    #[test]
    fn lcc_of_a_connected_graph_is_the_graph(g in connected_graph(48)) {
        let lcc = extract_lcc(&g).unwrap();
        prop_assert!(lcc.is_connected());
        prop_assert_eq!(lcc.vertex_count(), g.vertex_count());
        prop_assert_eq!(lcc.edge_count(), g.edge_count());
    }

    #[test]
    fn lcc_picks_the_larger_component(
        a in connected_graph(32),
        b in connected_graph(32),
    ) {
        let offset = a.vertex_count() as u32;
        let mut coords = a.coords().to_vec();
        coords.extend_from_slice(b.coords());
        let mut edges: Vec<_> = a.edges().iter().map(|e| (e.u.0, e.v.0, e.w)).collect();
        edges.extend(b.edges().iter().map(|e| (e.u.0 + offset, e.v.0 + offset, e.w)));
        let both = RoadNetwork::from_edges(coords, &edges).unwrap();
        prop_assert!(!both.is_connected());
        let lcc = extract_lcc(&both).unwrap();
        prop_assert!(lcc.is_connected());
        prop_assert_eq!(lcc.vertex_count(), a.vertex_count().max(b.vertex_count()));
    }

    #[test]
    fn dijkstra_matches_bellman_ford(g in connected_graph(48)) {
        let map = sssp(&g, VertexId(0));
        let slow = bellman_ford(&g, VertexId(0));
        for v in g.vertices() {
            prop_assert_eq!(map.get(v), slow[v.index()]);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 16, ..ProptestConfig::default() })]

    #[test]
    fn social_snapshots_round_trip(
        g in sized_connected_graph(5, 40),
        params in model_params(),
    ) {
        let base = Arc::new(g);
        let oracle = DijkstraOracle::new(Arc::clone(&base));
        let net = construct(Arc::clone(&base), params, &oracle).unwrap();
        let mut buf = Vec::new();
        models::write_snapshot(&net, &mut buf).unwrap();
        let back = models::read_snapshot(Arc::clone(&base), buf.as_slice()).unwrap();
        prop_assert_eq!(net.params(), back.params());
        prop_assert_eq!(net.long_range(), back.long_range());
        prop_assert_eq!(net.added_degrees(), back.added_degrees());
    }

    #[test]
    fn construction_bookkeeping_is_consistent(
        g in sized_connected_graph(5, 40),
        params in model_params(),
    ) {
        let base = Arc::new(g);
        let oracle = DijkstraOracle::new(Arc::clone(&base));
        let net = construct(Arc::clone(&base), params, &oracle).unwrap();
        let n = base.vertex_count() as u64;
        let m = params.m as u64;

        // every vertex draws at most m links, the seed group draws fewer
        let budget = if n > m { m * (n - m - 1) + m * (m + 1) / 2 } else { n * (n - 1) / 2 };
        prop_assert!(net.long_range_count() as u64 <= budget);

        let mut recount = vec![0u32; base.vertex_count()];
        for &(u, v) in net.long_range() {
            prop_assert_ne!(u, v);
            recount[u.index()] += 1;
            recount[v.index()] += 1;
        }
        for v in base.vertices() {
            prop_assert_eq!(net.added_degree(v), recount[v.index()]);
            let mut lr = net.lr_neighbors(v).to_vec();
            lr.sort();
            lr.dedup();
            prop_assert_eq!(lr.len() as u32, net.added_degree(v));
        }
        let total: u32 = net.added_degrees().iter().sum();
        prop_assert_eq!(total as usize, 2 * net.long_range_count());
        prop_assert_eq!(
            net.max_added_degree(),
            net.added_degrees().iter().copied().max().unwrap_or(0)
        );
        if let Some(cap) = params.cap {
            prop_assert!(net.max_added_degree() <= cap + params.m);
        }
    }

    #[test]
    fn greedy_routing_always_gets_closer(
        g in sized_connected_graph(5, 40),
        params in model_params(),
        picks in prop::collection::vec((any::<usize>(), any::<usize>(), any::<u64>()), 3),
    ) {
        let base = Arc::new(g);
        let oracle = DijkstraOracle::new(Arc::clone(&base));
        let net = construct(Arc::clone(&base), params, &oracle).unwrap();
        let n = base.vertex_count();
        for (a, b, seed) in picks {
            let (source, target) = (VertexId((a % n) as u32), VertexId((b % n) as u32));
            let map = sssp(&base, target);
            let q = RouteQuery { source, target, dropout_p: 0.0, seed };
            let res = greedy_route(&net, &map, &q).unwrap();
            prop_assert!(res.delivered);
            prop_assert_eq!(res.hops as usize, res.trace.steps.len());
            if source == target {
                prop_assert_eq!(res.hops, 0);
                continue;
            }
            prop_assert_eq!(res.trace.steps[0].vertex, source);
            for w in res.trace.steps.windows(2) {
                prop_assert!(w[1].remaining < w[0].remaining);
            }
            for step in &res.trace.steps {
                prop_assert_eq!(step.remaining, map.get(step.vertex));
                prop_assert_eq!(step.total_degree, net.total_degree(step.vertex));
            }
            // greedy cannot beat the contact-graph shortest path
            prop_assert!(res.hops >= bfs_contact_hops(&net, source, target));
        }
    }
}
