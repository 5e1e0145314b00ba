//! Brute-force oracles and graph generators shared by the integration tests.
//!
//! Each oracle is an independent, obviously-correct implementation of the
//! algorithm's mathematical definition: a queue BFS, union-find components,
//! and dense power iteration. None of them share code with the engine.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dualgraph_core::algorithms::bfs::{MAX_DEPTH, UNREACHED};
use dualgraph_core::{CsrGraph, RawEdgeList};

/// Textbook queue BFS. Depths mirror the engine's u8 encoding: unreached is
/// 255, and discoveries past depth 254 clamp (flag returned alongside).
pub fn queue_bfs(csr: &CsrGraph, source: u32) -> (Vec<u8>, bool) {
    let v = csr.vertex_count as usize;
    let mut depth: Vec<u32> = vec![u32::MAX; v];
    depth[source as usize] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &w in csr.neighbors(u) {
            if depth[w as usize] == u32::MAX {
                depth[w as usize] = depth[u as usize] + 1;
                queue.push_back(w);
            }
        }
    }
    let clamped = depth
        .iter()
        .any(|&d| d != u32::MAX && d > u32::from(MAX_DEPTH));
    let depths = depth
        .iter()
        .map(|&d| {
            if d == u32::MAX {
                UNREACHED
            } else {
                d.min(u32::from(MAX_DEPTH)) as u8
            }
        })
        .collect();
    (depths, clamped)
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: u32) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: u32) -> u32 {
        let mut root = v;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut cur = v;
        while self.parent[cur as usize] != root {
            cur = std::mem::replace(&mut self.parent[cur as usize], root);
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Keep the smaller id as the root so labels match the engine's
            // min-label convention directly.
            let (lo, hi) = (ra.min(rb), ra.max(rb));
            self.parent[hi as usize] = lo;
        }
    }
}

/// Weakly connected components by union-find: every edge joins its endpoints
/// regardless of direction, and each vertex is labeled with the minimum
/// vertex id of its component.
pub fn union_find_wcc(raw: &RawEdgeList) -> Vec<u32> {
    let mut uf = UnionFind::new(raw.vertex_count);
    for &(u, v) in &raw.edges {
        uf.union(u, v);
    }
    (0..raw.vertex_count).map(|v| uf.find(v)).collect()
}

/// Dense Jacobi power iteration in f64 with uniform dangling-mass
/// redistribution, run to a much tighter tolerance than the engine's.
pub fn dense_pagerank(csr: &CsrGraph, damping: f64, max_iters: u32) -> Vec<f64> {
    let v = csr.vertex_count as usize;
    if v == 0 {
        return Vec::new();
    }
    let n = v as f64;
    let base = (1.0 - damping) / n;
    let mut ranks = vec![1.0 / n; v];
    let mut next = vec![0.0f64; v];
    for _ in 0..max_iters {
        next.fill(0.0);
        let mut dangling = 0.0f64;
        for (u, &rank) in ranks.iter().enumerate() {
            let deg = csr.out_degree(u as u32);
            if deg == 0 {
                dangling += rank;
                continue;
            }
            let share = rank / f64::from(deg);
            for &w in csr.neighbors(u as u32) {
                next[w as usize] += share;
            }
        }
        let dangling_share = dangling / n;
        let mut delta = 0.0f64;
        for u in 0..v {
            let fresh = base + damping * (next[u] + dangling_share);
            delta = delta.max((fresh - ranks[u]).abs());
            ranks[u] = fresh;
        }
        if delta < 1e-13 {
            break;
        }
    }
    ranks
}

/// A random directed graph with deliberately messy features: duplicate
/// edges, self loops, isolated trailing vertices, and occasionally no edges
/// at all.
pub fn random_graph(rng: &mut ChaCha8Rng, max_vertices: u32, max_edges: usize) -> RawEdgeList {
    let vertices = rng.gen_range(1..=max_vertices);
    let edges = if rng.gen_bool(0.05) {
        0
    } else {
        rng.gen_range(1..=max_edges)
    };
    let mut out = Vec::with_capacity(edges);
    for _ in 0..edges {
        let u = rng.gen_range(0..vertices);
        let v = if rng.gen_bool(0.02) {
            u // self loop
        } else {
            rng.gen_range(0..vertices)
        };
        out.push((u, v));
        if rng.gen_bool(0.03) {
            out.push((u, v)); // duplicate
        }
    }
    RawEdgeList {
        edges: out,
        weights: None,
        vertex_count: vertices,
        directed: true,
    }
}

/// Deterministic sub-generator seeds so each case is reproducible on its own.
pub fn case_rng(suite_seed: u64, case: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(suite_seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ case)
}
