//! Baseline executors the engine strategies are compared against.
//!
//! * [`stream_iteration`]: edge-centric streaming — walk the whole edge
//!   array once per iteration in canonical order (ascending source, CSR
//!   edge order), scattering for sources that carry a message. The stream
//!   always moves every edge, which is exactly its cost model:
//!   `edges_examined` is `|E|` per iteration no matter how small the
//!   frontier is.
//! * [`vertex_pull_iteration`]: vertex-centric pull over the transposed
//!   graph — fold each candidate destination's in-edges, with the same
//!   open/saturated filtering as the block pull engine.
//!
//! Both run sequentially; they are reference points, not the optimized
//! paths.

use crate::frontier::Bitmap;
use crate::gas::GasKernel;
use crate::graph_io::CsrGraph;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct StreamOutcome {
    /// Always the full edge count: a stream moves everything.
    pub edges_examined: u64,
    /// Sources whose messages actually scattered.
    pub sources_matched: u64,
}

/// One edge-centric streaming iteration over the full graph.
pub fn stream_iteration<K: GasKernel>(csr: &CsrGraph, kernel: &K) -> StreamOutcome {
    let mut matched = 0u64;
    for u in 0..csr.vertex_count {
        if kernel.source_active(u) {
            matched += 1;
            for &v in csr.neighbors(u) {
                kernel.scatter(u, v);
            }
        }
    }
    StreamOutcome {
        edges_examined: csr.edge_count() as u64,
        sources_matched: matched,
    }
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct VertexPullOutcome {
    /// In-edges folded after open/saturated filtering.
    pub edges_examined: u64,
    /// Candidates that were open and got applied.
    pub destinations_processed: u64,
}

/// One vertex-centric pull iteration: fold in-edges of every candidate
/// destination. `csc` must be the transposed graph, so `csc.neighbors(v)`
/// are v's in-neighbors in the original orientation.
pub fn vertex_pull_iteration<K: GasKernel>(
    csc: &CsrGraph,
    kernel: &K,
    candidates: &Bitmap,
) -> VertexPullOutcome {
    let mut out = VertexPullOutcome::default();
    for dst in candidates.iter_ones() {
        if !kernel.dst_open(dst) {
            continue;
        }
        let mut acc = kernel.acc_init();
        for &src in csc.neighbors(dst) {
            if kernel.acc_saturated(&acc) {
                break;
            }
            acc = kernel.gather(src, dst, acc);
            out.edges_examined += 1;
        }
        kernel.apply(dst, acc);
        out.destinations_processed += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::{BfsKernel, PageRankKernel, WccKernel};
    use crate::gas::IterCtx;
    use crate::graph_io::{build_csc, build_csr, RawEdgeList};
    use crate::push_engine::push_iteration;
    use crate::synth::uniform_graph;

    fn raw_of(vertex_count: u32, edges: &[(u32, u32)]) -> RawEdgeList {
        RawEdgeList {
            edges: edges.to_vec(),
            weights: None,
            vertex_count,
            directed: true,
        }
    }

    #[test]
    fn stream_examines_every_edge_but_scatters_frontier_only() {
        let raw = raw_of(4, &[(0, 1), (1, 2), (2, 3)]);
        let csr = build_csr(&raw);
        let mut kernel = BfsKernel::new(4, 0);
        let ctx = IterCtx { iteration: 0 };
        kernel.begin_iteration(&ctx);
        let out = stream_iteration(&csr, &kernel);
        kernel.end_iteration(&ctx);
        assert_eq!(out.edges_examined, 3, "a stream always moves |E|");
        assert_eq!(out.sources_matched, 1);
        assert_eq!(kernel.depths(), vec![0, 1, u8::MAX, u8::MAX]);
    }

    #[test]
    fn stream_equals_push_for_ordered_kernels() {
        // The stream walks edges in the same canonical order the sequential
        // push path uses, so even float kernels agree bitwise.
        let raw = uniform_graph(200, 1200, 21);
        let csr = build_csr(&raw);
        let via = |stream: bool| {
            let mut k = PageRankKernel::new(&csr, 0.85, 0.0, 6);
            for iteration in 0..6 {
                let ctx = IterCtx { iteration };
                let active = k.changed().to_active_list();
                k.begin_iteration(&ctx);
                if stream {
                    stream_iteration(&csr, &k);
                } else {
                    push_iteration(&csr, &active, &k, 1);
                }
                if k.end_iteration(&ctx).terminated {
                    break;
                }
            }
            k.ranks().iter().map(|r| r.to_bits()).collect::<Vec<_>>()
        };
        assert_eq!(via(true), via(false));
    }

    #[test]
    fn vertex_pull_filters_closed_and_saturated() {
        // 1 is already visited; 4 has two frontier in-edges but saturates
        // after the first.
        let raw = raw_of(5, &[(0, 1), (0, 4), (1, 4), (2, 4)]);
        let csc = build_csc(&raw);
        let mut kernel = BfsKernel::new(5, 0);
        // Visit 1 in a first round.
        let ctx = IterCtx { iteration: 0 };
        kernel.begin_iteration(&ctx);
        kernel.scatter(0, 1);
        kernel.end_iteration(&ctx);
        // Second round: candidates {1, 4}.
        let ctx = IterCtx { iteration: 1 };
        kernel.begin_iteration(&ctx);
        let mut candidates = Bitmap::new(5);
        candidates.set(1);
        candidates.set(4);
        let out = vertex_pull_iteration(&csc, &kernel, &candidates);
        kernel.end_iteration(&ctx);
        assert_eq!(out.destinations_processed, 1, "1 is closed");
        // 4's in-neighbors in CSC order are {0, 1, 2}: 0 is not in the
        // frontier (folds false), 1 is (saturates), 2 never folds.
        assert_eq!(out.edges_examined, 2);
        assert_eq!(kernel.depths()[4], 2);
    }

    #[test]
    fn vertex_pull_round_matches_push_round() {
        let raw = uniform_graph(300, 2400, 5);
        let csr = build_csr(&raw);
        let csc = build_csc(&raw);

        let mut every = Bitmap::new(300);
        every.set_all();
        let ctx = IterCtx { iteration: 0 };

        let mut push_k = WccKernel::new(300);
        push_k.begin_iteration(&ctx);
        push_iteration(&csr, &every.to_active_list(), &push_k, 1);
        push_k.end_iteration(&ctx);

        let mut pull_k = WccKernel::new(300);
        pull_k.begin_iteration(&ctx);
        let out = vertex_pull_iteration(&csc, &pull_k, &every);
        pull_k.end_iteration(&ctx);

        assert_eq!(push_k.labels(), pull_k.labels());
        assert!(out.destinations_processed > 0);
    }
}
