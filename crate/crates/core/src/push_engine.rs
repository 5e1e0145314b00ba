//! Vertex-centric push engine.
//!
//! One iteration scatters along every out-edge of every active vertex. Work
//! is chunked in groups of [`GROUP_LANES`] out-edges per vertex — the unit
//! the loop accounting reports — and active vertices are claimed in batches
//! by a small worker pool. Kernels whose scatters do not commute (see
//! [`GasKernel::ORDERED_PUSH`]) run on one thread in canonical order:
//! ascending source, CSR edge order within a source.
//!
//! Sources are always re-checked against [`GasKernel::source_active`], so
//! feeding a superset of the frontier (e.g. a full-scan reference run)
//! produces byte-identical state: inactive sources are no-ops and their
//! edges are not counted.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::frontier::ActiveList;
use crate::gas::GasKernel;
use crate::graph_io::CsrGraph;

/// Out-edges processed per work-group loop.
pub const GROUP_LANES: u32 = 16;

/// Active vertices claimed per worker grab.
const CLAIM_BATCH: usize = 128;

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct PushOutcome {
    /// Total out-edges of the sources actually processed.
    pub edges_examined: u64,
    /// Work-group loops: `ceil(out_degree / GROUP_LANES)` per source.
    pub group_loops: u64,
    /// Sources that passed the activity gate.
    pub sources_processed: u64,
}

impl PushOutcome {
    fn absorb(&mut self, other: PushOutcome) {
        self.edges_examined += other.edges_examined;
        self.group_loops += other.group_loops;
        self.sources_processed += other.sources_processed;
    }
}

/// Run one push iteration over `active` sources with up to `workers` threads.
pub fn push_iteration<K: GasKernel>(
    csr: &CsrGraph,
    active: &ActiveList,
    kernel: &K,
    workers: usize,
) -> PushOutcome {
    if K::ORDERED_PUSH || workers <= 1 || active.len() <= CLAIM_BATCH {
        let mut out = PushOutcome::default();
        for &v in active.as_slice() {
            scatter_vertex(csr, kernel, v, &mut out);
        }
        return out;
    }

    let cursor = AtomicUsize::new(0);
    let ids = active.as_slice();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                scope.spawn(|| {
                    let mut local = PushOutcome::default();
                    loop {
                        let start = cursor.fetch_add(CLAIM_BATCH, Ordering::Relaxed);
                        if start >= ids.len() {
                            break;
                        }
                        let end = (start + CLAIM_BATCH).min(ids.len());
                        for &v in &ids[start..end] {
                            scatter_vertex(csr, kernel, v, &mut local);
                        }
                    }
                    local
                })
            })
            .collect();
        let mut out = PushOutcome::default();
        for handle in handles {
            out.absorb(handle.join().expect("push worker panicked"));
        }
        out
    })
}

fn scatter_vertex<K: GasKernel>(
    csr: &CsrGraph,
    kernel: &K,
    v: crate::VertexId,
    out: &mut PushOutcome,
) {
    if !kernel.source_active(v) {
        return;
    }
    let neighbors = csr.neighbors(v);
    out.edges_examined += neighbors.len() as u64;
    out.group_loops += (neighbors.len() as u64).div_ceil(u64::from(GROUP_LANES));
    out.sources_processed += 1;
    for group in neighbors.chunks(GROUP_LANES as usize) {
        for &dst in group {
            kernel.scatter(v, dst);
        }
    }
}
