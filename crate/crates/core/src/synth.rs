//! Deterministic synthetic graph generators for benchmarks and tests.

use std::collections::HashSet;

use rand::RngExt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{ExternalId, Graph, GraphBuilder};

/// Uniform random graph with `n` nodes and `m` distinct edges (no self-loops).
/// External ids are 0..n, all of which are registered even when isolated.
pub fn gnm(n: usize, m: usize, seed: u64) -> Graph {
    let max_edges = n.saturating_mul(n.saturating_sub(1)) / 2;
    let m = m.min(max_edges);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::new();
    for v in 0..n {
        builder.add_node(ExternalId::Num(v as u64));
    }
    let mut chosen: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    while chosen.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if chosen.insert(key) {
            builder.add_edge(
                ExternalId::Num(key.0 as u64),
                ExternalId::Num(key.1 as u64),
                1.0,
            );
        }
    }
    builder.build()
}

/// Connected random graph: a random spanning tree plus `extra` distinct
/// random edges.
pub fn connected_gnm(n: usize, extra: usize, seed: u64) -> Graph {
    assert!(n >= 1, "connected graph needs at least one node");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::new();
    builder.add_node(ExternalId::Num(0));
    let mut chosen: HashSet<(usize, usize)> = HashSet::new();
    for v in 1..n {
        let u = rng.random_range(0..v);
        chosen.insert((u, v));
        builder.add_edge(ExternalId::Num(u as u64), ExternalId::Num(v as u64), 1.0);
    }
    let max_edges = n * (n - 1) / 2;
    let target = (chosen.len() + extra).min(max_edges);
    while chosen.len() < target {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if chosen.insert(key) {
            builder.add_edge(
                ExternalId::Num(key.0 as u64),
                ExternalId::Num(key.1 as u64),
                1.0,
            );
        }
    }
    builder.build()
}

/// Planted-partition graph: `n` nodes split into `blocks` equal groups with
/// exactly `m` edges, an `intra` fraction of them inside groups. Useful as a
/// community-structured stand-in for social network datasets.
pub fn planted_partition(n: usize, m: usize, blocks: usize, intra: f64, seed: u64) -> Graph {
    assert!(blocks >= 1 && blocks <= n, "block count must be in 1..=n");
    assert!((0.0..=1.0).contains(&intra), "intra fraction must be in [0,1]");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = GraphBuilder::new();
    for v in 0..n {
        builder.add_node(ExternalId::Num(v as u64));
    }
    let block_of = |v: usize| v * blocks / n;
    let mut chosen: HashSet<(usize, usize)> = HashSet::with_capacity(m);
    let intra_target = (m as f64 * intra).round() as usize;

    let add = |rng: &mut ChaCha8Rng,
                   chosen: &mut HashSet<(usize, usize)>,
                   builder: &mut GraphBuilder,
                   want_intra: bool| {
        for _ in 0..64 * n.max(16) {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v || (block_of(u) == block_of(v)) != want_intra {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if chosen.insert(key) {
                builder.add_edge(
                    ExternalId::Num(key.0 as u64),
                    ExternalId::Num(key.1 as u64),
                    1.0,
                );
                return true;
            }
        }
        false
    };

    let mut intra_added = 0;
    while intra_added < intra_target && add(&mut rng, &mut chosen, &mut builder, true) {
        intra_added += 1;
    }
    while chosen.len() < m && add(&mut rng, &mut chosen, &mut builder, false) {}
    // Dense corner cases may exhaust one side; fill from anywhere.
    while chosen.len() < m {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if chosen.insert(key) {
            builder.add_edge(
                ExternalId::Num(key.0 as u64),
                ExternalId::Num(key.1 as u64),
                1.0,
            );
        }
    }
    builder.build()
}
